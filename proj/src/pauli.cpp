#include "pbqc/pauli.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "pbqc/error.hpp"
#include "pbqc/linalg.hpp"

namespace pbqc {

namespace {

int mod4(int v) { return ((v % 4) + 4) % 4; }

Complex i_pow(int k) {
    switch (mod4(k)) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

}  // namespace

PauliOperator::PauliOperator(std::size_t num_qubits) : PauliOperator(num_qubits, 0, 0, 0) {}

PauliOperator::PauliOperator(std::size_t num_qubits, std::uint64_t x_mask, std::uint64_t z_mask, int phase)
    : num_qubits_(num_qubits), x_(x_mask), z_(z_mask), phase_(mod4(phase)) {
    if (num_qubits > kMaxQubits) throw ResourceError("PauliOperator supports at most 32 qubits");
    const std::uint64_t limit = num_qubits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_qubits) - 1;
    if ((x_mask & ~limit) || (z_mask & ~limit)) throw DimensionError("Pauli mask exceeds qubit count");
}

PauliOperator PauliOperator::hermitian(std::size_t num_qubits, std::uint64_t x_mask, std::uint64_t z_mask) {
    return PauliOperator(num_qubits, x_mask, z_mask, std::popcount(x_mask & z_mask));
}

PauliOperator PauliOperator::parse(std::string_view text) {
    int phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') phase = 2;
        ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        ++pos;
    }
    const std::string_view letters = text.substr(pos);
    if (letters.empty()) throw ValidationError("empty Pauli string");
    const std::size_t n = letters.size();
    std::uint64_t x = 0, z = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t b = qubit_bit(n, q);
        switch (letters[q]) {
            case 'I': break;
            case 'X': x |= b; break;
            case 'Z': z |= b; break;
            case 'Y': x |= b; z |= b; break;
            default: throw ValidationError("bad Pauli letter in '" + std::string(text) + "'");
        }
    }
    return PauliOperator(n, x, z, phase + std::popcount(x & z));
}

PauliOperator PauliOperator::from_bell(const BellOutcome& outcome, std::size_t num_qubits, std::size_t qubit) {
    if (qubit >= num_qubits) throw DimensionError("qubit index out of range");
    const std::uint64_t b = qubit_bit(num_qubits, qubit);
    return PauliOperator(num_qubits, outcome.x ? b : 0, outcome.z ? b : 0, 0);
}

ComplexMatrix PauliOperator::matrix() const {
    if (num_qubits_ > 12) throw ResourceError("dense Pauli matrix limited to 12 qubits");
    const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << num_qubits_);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    const Complex global = i_pow(phase_);
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c)
        m(static_cast<Eigen::Index>(c ^ x_), static_cast<Eigen::Index>(c)) = parity(c & z_) ? -global : global;
    return m;
}

PauliOperator PauliOperator::inverse() const {
    return PauliOperator(num_qubits_, x_, z_, -phase_ - 2 * std::popcount(x_ & z_));
}

PauliOperator PauliOperator::tensor(const PauliOperator& other) const {
    const std::size_t m = other.num_qubits_;
    return PauliOperator(num_qubits_ + m, (x_ << m) | other.x_, (z_ << m) | other.z_, phase_ + other.phase_);
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
    return parity((x_ & other.z_) ^ (z_ & other.x_)) == 0;
}

PauliOperator PauliOperator::on_qubit(std::size_t qubit) const {
    const std::uint64_t b = qubit_bit(num_qubits_, qubit);
    return hermitian(1, (x_ & b) ? 1 : 0, (z_ & b) ? 1 : 0);
}

std::string PauliOperator::to_string() const {
    static constexpr const char* kPrefix[] = {"+", "+i", "-", "-i"};
    std::string s = kPrefix[mod4(phase_ - std::popcount(x_ & z_))];
    for (std::size_t q = 0; q < num_qubits_; ++q) {
        const std::uint64_t b = qubit_bit(num_qubits_, q);
        const bool xb = x_ & b, zb = z_ & b;
        s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return s;
}

PauliOperator pauli_mul(const PauliOperator& p, const PauliOperator& q) {
    if (p.num_qubits() != q.num_qubits()) throw DimensionError("pauli_mul: qubit count mismatch");
    // X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
    const int sign = 2 * std::popcount(p.z_mask() & q.x_mask());
    return PauliOperator(p.num_qubits(), p.x_mask() ^ q.x_mask(), p.z_mask() ^ q.z_mask(), p.phase() + q.phase() + sign);
}

BasisImage pauli_apply_to_basis(const PauliOperator& p, const Bits& x) {
    if (x.size() != p.num_qubits()) throw DimensionError("pauli_apply_to_basis: length mismatch");
    const std::uint64_t c = bits_to_index(x);
    Complex phase = i_pow(p.phase());
    if (parity(c & p.z_mask())) phase = -phase;
    return {index_to_bits(c ^ p.x_mask(), p.num_qubits()), phase};
}

std::optional<PauliOperator> try_as_pauli(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) return std::nullopt;
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < m.rows()) ++n;
    if ((Eigen::Index{1} << n) != m.rows()) return std::nullopt;

    Eigen::Index row = 0;
    m.col(0).cwiseAbs().maxCoeff(&row);
    const auto x = static_cast<std::uint64_t>(row);
    const Complex v0 = m(row, 0);
    if (std::abs(std::abs(v0) - 1.0) > tol) return std::nullopt;
    const int phase = mod4(static_cast<int>(std::lround(std::arg(v0) / (std::numbers::pi / 2))));
    const Complex base = i_pow(phase);
    std::uint64_t z = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t c = qubit_bit(n, q);
        const Complex v = m(static_cast<Eigen::Index>(c ^ x), static_cast<Eigen::Index>(c)) / base;
        if (v.real() < 0) z |= c;
    }
    PauliOperator candidate(n, x, z, phase);
    if (max_abs(m - candidate.matrix()) > tol) return std::nullopt;
    return candidate;
}

std::optional<PauliOperator> try_as_pauli_up_to_phase(const ComplexMatrix& m, double tol) {
    if (m.rows() == 0 || m.rows() != m.cols()) return std::nullopt;
    Eigen::Index row = 0;
    m.col(0).cwiseAbs().maxCoeff(&row);
    const Complex v0 = m(row, 0);
    if (std::abs(v0) < 0.5) return std::nullopt;
    auto p = try_as_pauli(m * (std::conj(v0) / std::abs(v0)), tol);
    if (!p) return std::nullopt;
    return p->without_phase();
}

std::vector<PauliOperator> all_paulis(std::size_t num_qubits) {
    if (num_qubits > 6) throw ResourceError("all_paulis limited to 6 qubits");
    std::vector<PauliOperator> out;
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    for (std::uint64_t x = 0; x < dim; ++x)
        for (std::uint64_t z = 0; z < dim; ++z) out.push_back(PauliOperator::hermitian(num_qubits, x, z));
    return out;
}

StateVector apply_pauli(const StateVector& state, const PauliOperator& p, std::span<const std::size_t> targets) {
    if (targets.size() != p.num_qubits()) throw DimensionError("apply_pauli: target count mismatch");
    return apply_unitary(state, p.matrix(), targets);
}

}  // namespace pbqc
