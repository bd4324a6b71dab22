#include "pbqc/state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "pbqc/error.hpp"
#include "pbqc/linalg.hpp"

namespace pbqc {

namespace {

std::size_t qubits_for_dim(std::size_t dim) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim) throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    return n;
}

void check_targets(std::size_t num_qubits, std::span<const std::size_t> targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= num_qubits)
            throw DimensionError("qubit index " + std::to_string(targets[i]) + " out of range for " +
                                 std::to_string(num_qubits) + " qubits");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[j] == targets[i]) throw ValidationError("repeated target qubit " + std::to_string(targets[i]));
    }
}

}  // namespace

std::uint64_t bits_to_index(const Bits& bits) {
    std::uint64_t index = 0;
    for (auto b : bits) index = (index << 1) | (b & 1u);
    return index;
}

Bits index_to_bits(std::uint64_t index, std::size_t num_qubits) {
    Bits bits(num_qubits);
    for (std::size_t q = 0; q < num_qubits; ++q) bits[q] = static_cast<std::uint8_t>((index >> (num_qubits - 1 - q)) & 1u);
    return bits;
}

std::size_t hamming_distance(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw DimensionError("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::size_t num_qubits, ComplexVector amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::basis(std::size_t num_qubits, std::uint64_t index) {
    if (num_qubits > kMaxQubits) throw ResourceError("state of " + std::to_string(num_qubits) + " qubits exceeds simulator limit");
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (index >= dim) throw DimensionError("basis index out of range");
    ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    amps(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

StateVector StateVector::basis(const Bits& bits) { return basis(bits.size(), bits_to_index(bits)); }

StateVector StateVector::from_amplitudes(ComplexVector amplitudes, double tol) {
    const std::size_t n = qubits_for_dim(static_cast<std::size_t>(amplitudes.size()));
    if (!amplitudes.allFinite()) throw ValidationError("state amplitudes must be finite");
    if (std::abs(amplitudes.norm() - 1.0) > tol) throw ValidationError("state is not normalised");
    return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::normalized(ComplexVector amplitudes) {
    const std::size_t n = qubits_for_dim(static_cast<std::size_t>(amplitudes.size()));
    const double norm = amplitudes.norm();
    if (!(norm > 1e-300)) throw ValidationError("cannot normalise the zero vector");
    amplitudes /= norm;
    return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::tensor(const StateVector& other) const {
    if (num_qubits_ + other.num_qubits_ > kMaxQubits) throw ResourceError("tensor product exceeds simulator limit");
    ComplexVector amps(amplitudes_.size() * other.amplitudes_.size());
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i)
        amps.segment(i * other.amplitudes_.size(), other.amplitudes_.size()) = amplitudes_(i) * other.amplitudes_;
    return StateVector(num_qubits_ + other.num_qubits_, std::move(amps));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(std::size_t num_qubits, ComplexMatrix matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
    return DensityMatrix(state.num_qubits(), state.amplitudes() * state.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t num_qubits) {
    const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << num_qubits);
    return DensityMatrix(num_qubits, ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix matrix, double tol) {
    if (matrix.rows() != matrix.cols()) throw DimensionError("density matrix must be square");
    const std::size_t n = qubits_for_dim(static_cast<std::size_t>(matrix.rows()));
    if (!matrix.allFinite()) throw ValidationError("density matrix entries must be finite");
    if (max_abs(matrix - matrix.adjoint()) > tol) throw ValidationError("density matrix is not Hermitian");
    if (std::abs(matrix.trace() - Complex(1.0)) > tol) throw ValidationError("density matrix trace is not 1");
    const auto eig = hermitian_eigendecomposition(matrix);
    if (eig.values.size() > 0 && eig.values(0) < -1e-9) throw ValidationError("density matrix has a negative eigenvalue");
    return DensityMatrix(n, std::move(matrix));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix matrix) {
    const std::size_t n = qubits_for_dim(static_cast<std::size_t>(matrix.rows()));
    return DensityMatrix(n, std::move(matrix));
}

// ---------------------------------------------------------------------------
// Operations

StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary, std::span<const std::size_t> targets) {
    const std::size_t n = state.num_qubits();
    check_targets(n, targets);
    const std::size_t k = targets.size();
    const auto sub = static_cast<Eigen::Index>(std::uint64_t{1} << k);
    if (unitary.rows() != sub || unitary.cols() != sub)
        throw DimensionError("gate of dimension " + std::to_string(unitary.rows()) + " does not match " +
                             std::to_string(k) + " target qubits");

    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(sub), 0);
    std::uint64_t mask = 0;
    for (std::size_t t = 0; t < k; ++t) mask |= qubit_bit(n, targets[t]);
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(sub); ++j)
        for (std::size_t t = 0; t < k; ++t)
            if ((j >> (k - 1 - t)) & 1u) offsets[j] |= qubit_bit(n, targets[t]);

    ComplexVector amps = state.amplitudes();
    ComplexVector local(sub);
    const std::uint64_t dim = state.dim();
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (Eigen::Index j = 0; j < sub; ++j) local(j) = amps(static_cast<Eigen::Index>(base | offsets[j]));
        const ComplexVector out = unitary * local;
        for (Eigen::Index j = 0; j < sub; ++j) amps(static_cast<Eigen::Index>(base | offsets[j])) = out(j);
    }
    return StateVector::normalized(std::move(amps));
}

StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary,
                          std::initializer_list<std::size_t> targets) {
    return apply_unitary(state, unitary, std::span<const std::size_t>(targets.begin(), targets.size()));
}

double qubit_probability(const StateVector& state, std::size_t qubit, int bit) {
    if (qubit >= state.num_qubits()) throw DimensionError("qubit index out of range");
    const std::uint64_t b = qubit_bit(state.num_qubits(), qubit);
    double p = 0.0;
    for (std::uint64_t i = 0; i < state.dim(); ++i)
        if (((i & b) != 0) == (bit != 0)) p += std::norm(state.amplitude(i));
    return p;
}

MeasurementResult measure_computational(const StateVector& state, std::span<const std::size_t> targets, RngStream& rng) {
    const std::size_t n = state.num_qubits();
    check_targets(n, targets);
    ComplexVector amps = state.amplitudes();
    Bits outcome(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const std::uint64_t b = qubit_bit(n, targets[t]);
        double p1 = 0.0, total = 0.0;
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            const double w = std::norm(amps(i));
            total += w;
            if (static_cast<std::uint64_t>(i) & b) p1 += w;
        }
        const int bit = rng.uniform() * total < p1 ? 1 : 0;
        outcome[t] = static_cast<std::uint8_t>(bit);
        for (Eigen::Index i = 0; i < amps.size(); ++i)
            if (((static_cast<std::uint64_t>(i) & b) != 0) != (bit == 1)) amps(i) = 0.0;
    }
    return {std::move(outcome), StateVector::normalized(std::move(amps))};
}

MeasurementResult measure_all(const StateVector& state, RngStream& rng) {
    std::vector<std::size_t> all(state.num_qubits());
    for (std::size_t q = 0; q < all.size(); ++q) all[q] = q;
    return measure_computational(state, all, rng);
}

StateVector project_out(const StateVector& state, std::size_t qubit, int bit) {
    const std::size_t n = state.num_qubits();
    if (qubit >= n) throw DimensionError("qubit index out of range");
    const std::size_t low_bits = n - 1 - qubit;
    const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;
    ComplexVector amps(static_cast<Eigen::Index>(state.dim() / 2));
    for (std::uint64_t j = 0; j < state.dim() / 2; ++j) {
        const std::uint64_t high = j >> low_bits;
        const std::uint64_t low = j & low_mask;
        const std::uint64_t i = (((high << 1) | static_cast<std::uint64_t>(bit)) << low_bits) | low;
        amps(static_cast<Eigen::Index>(j)) = state.amplitude(i);
    }
    if (amps.norm() < 1e-12) throw ProtocolError("projection onto a zero-probability outcome");
    return StateVector::normalized(std::move(amps));
}

StateVector move_qubit(const StateVector& state, std::size_t from, std::size_t to) {
    const std::size_t n = state.num_qubits();
    if (from >= n || to >= n) throw DimensionError("qubit index out of range");
    if (from == to) return state;
    // order[p] = old qubit that ends up at position p
    std::vector<std::size_t> order;
    for (std::size_t q = 0; q < n; ++q)
        if (q != from) order.push_back(q);
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(to), from);
    ComplexVector amps(static_cast<Eigen::Index>(state.dim()));
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        std::uint64_t j = 0;
        for (std::size_t p = 0; p < n; ++p)
            if (i & qubit_bit(n, order[p])) j |= qubit_bit(n, p);
        amps(static_cast<Eigen::Index>(j)) = state.amplitude(i);
    }
    return StateVector::from_amplitudes(std::move(amps), 1e-8);
}

StateVector bell_pair() {
    ComplexVector amps = ComplexVector::Zero(4);
    amps(0) = amps(3) = 1.0 / std::sqrt(2.0);
    return StateVector::normalized(std::move(amps));
}

BellMeasurementResult bell_measurement(const StateVector& state, std::size_t q1, std::size_t q2, RngStream& rng) {
    if (q1 == q2) throw ValidationError("bell_measurement: qubits must differ");
    const std::array<std::size_t, 2> pair{q1, q2};
    check_targets(state.num_qubits(), pair);
    static const ComplexMatrix cnot = [] {
        ComplexMatrix m = ComplexMatrix::Zero(4, 4);
        m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
        return m;
    }();
    static const ComplexMatrix hadamard = [] {
        ComplexMatrix m(2, 2);
        const double s = 1.0 / std::sqrt(2.0);
        m << s, s, s, -s;
        return m;
    }();
    StateVector rotated = apply_unitary(state, cnot, pair);
    rotated = apply_unitary(rotated, hadamard, {q1});
    auto measured = measure_computational(rotated, pair, rng);
    BellOutcome outcome{measured.outcome[1], measured.outcome[0]};
    const std::size_t hi = std::max(q1, q2), lo = std::min(q1, q2);
    const int bit_hi = hi == q1 ? measured.outcome[0] : measured.outcome[1];
    const int bit_lo = lo == q1 ? measured.outcome[0] : measured.outcome[1];
    StateVector post = project_out(measured.post, hi, bit_hi);
    post = project_out(post, lo, bit_lo);
    return {outcome, std::move(post)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    const std::size_t n = rho.num_qubits();
    check_targets(n, keep);
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; ++q)
        if (std::find(kept.begin(), kept.end(), q) == kept.end()) traced.push_back(q);
    const std::size_t k = kept.size();
    const std::uint64_t dk = std::uint64_t{1} << k;
    const std::uint64_t dt = std::uint64_t{1} << traced.size();

    auto compose = [&](std::uint64_t a, std::uint64_t e) {
        std::uint64_t idx = 0;
        for (std::size_t t = 0; t < k; ++t)
            if ((a >> (k - 1 - t)) & 1u) idx |= qubit_bit(n, kept[t]);
        for (std::size_t t = 0; t < traced.size(); ++t)
            if ((e >> (traced.size() - 1 - t)) & 1u) idx |= qubit_bit(n, traced[t]);
        return static_cast<Eigen::Index>(idx);
    };

    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    const ComplexMatrix& m = rho.matrix();
    for (std::uint64_t a = 0; a < dk; ++a)
        for (std::uint64_t b = 0; b < dk; ++b) {
            Complex sum = 0.0;
            for (std::uint64_t e = 0; e < dt; ++e) sum += m(compose(a, e), compose(b, e));
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum;
        }
    return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

double fidelity(const StateVector& pure, const DensityMatrix& rho) {
    if (pure.dim() != static_cast<std::size_t>(rho.matrix().rows())) throw DimensionError("fidelity: dimension mismatch");
    const double f = pure.amplitudes().dot(rho.matrix() * pure.amplitudes()).real();
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace pbqc
