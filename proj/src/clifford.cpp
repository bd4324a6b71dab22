#include "pbqc/clifford.hpp"

#include <array>
#include <set>
#include <string>

#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/state.hpp"

namespace pbqc {

namespace {

std::size_t qubits_of(const ComplexMatrix& u) {
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < u.rows()) ++n;
    if (u.rows() != u.cols() || (Eigen::Index{1} << n) != u.rows()) throw DimensionError("expected a 2^n x 2^n matrix");
    return n;
}

bool maps_to_pauli(const ComplexMatrix& u, const PauliOperator& p, double tol) {
    return try_as_pauli(conjugate(u, p.matrix()), tol).has_value();
}

}  // namespace

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& p) { return u * p * u.adjoint(); }

bool is_clifford(const ComplexMatrix& u, double tol) {
    const std::size_t n = qubits_of(u);
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t b = qubit_bit(n, q);
        if (!maps_to_pauli(u, PauliOperator::hermitian(n, b, 0), tol)) return false;
        if (!maps_to_pauli(u, PauliOperator::hermitian(n, 0, b), tol)) return false;
    }
    return true;
}

bool in_clifford_level(const ComplexMatrix& u, int k, double tol) {
    if (k < 1) throw ValidationError("Clifford hierarchy levels start at 1");
    if (k == 1) return try_as_pauli_up_to_phase(u, tol).has_value();
    const std::size_t n = qubits_of(u);
    const auto paulis = all_paulis(n);
    for (std::size_t i = 1; i < paulis.size(); ++i)
        if (!in_clifford_level(conjugate(u, paulis[i].matrix()), k - 1, tol)) return false;
    return true;
}

HierarchyLevel hierarchy_level(const ComplexMatrix& u, int k_max, double tol) {
    const std::size_t n = qubits_of(u);
    if (n > 2) throw ValidationError("hierarchy_level supports at most 2 qubits");
    if (k_max < 1 || k_max > 4) throw ValidationError("hierarchy_level: k_max must lie in [1, 4]");
    require_unitary(u, "hierarchy_level");
    for (int k = 1; k <= k_max; ++k)
        if (in_clifford_level(u, k, tol)) return {k, k_max};
    return {std::nullopt, k_max};
}

bool is_semi_clifford(const ComplexMatrix& u, double tol) {
    const std::size_t n = qubits_of(u);
    if (n > 2) throw ValidationError("is_semi_clifford supports at most 2 qubits");
    require_unitary(u, "is_semi_clifford");
    const auto paulis = all_paulis(n);
    std::vector<bool> preserved(paulis.size());
    for (std::size_t i = 0; i < paulis.size(); ++i) preserved[i] = maps_to_pauli(u, paulis[i], tol);
    if (n == 1) {
        // Maximal abelian subgroups are {I, P}; the image of P alone decides.
        for (std::size_t i = 1; i < paulis.size(); ++i)
            if (preserved[i]) return true;
        return false;
    }
    // n = 2: maximal abelian subgroups are generated by two commuting,
    // independent non-identity Paulis; conjugation is a homomorphism, so the
    // generators decide.
    for (std::size_t a = 1; a < paulis.size(); ++a) {
        if (!preserved[a]) continue;
        for (std::size_t b = a + 1; b < paulis.size(); ++b)
            if (preserved[b] && paulis[a].commutes_with(paulis[b])) return true;
    }
    return false;
}

int count_pauli_preserving(const ComplexMatrix& u, double tol) {
    if (qubits_of(u) != 1) throw ValidationError("count_pauli_preserving requires a single-qubit unitary");
    require_unitary(u, "count_pauli_preserving");
    int count = 0;
    for (const auto& p : all_paulis(1)) count += maps_to_pauli(u, p, tol);
    return count;
}

}  // namespace pbqc

namespace pbqc {

namespace {

std::vector<std::int64_t> phase_key(const ComplexMatrix& m) {
    Complex ref(1.0, 0.0);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (std::abs(m.reshaped()(i)) > 1e-6) {
            ref = std::conj(m.reshaped()(i)) / std::abs(m.reshaped()(i));
            break;
        }
    }
    std::vector<std::int64_t> key;
    key.reserve(static_cast<std::size_t>(2 * m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex v = m.reshaped()(i) * ref;
        key.push_back(std::llround(v.real() * 1e6));
        key.push_back(std::llround(v.imag() * 1e6));
    }
    return key;
}

std::vector<ComplexMatrix> clifford_generators(std::size_t n) {
    std::vector<ComplexMatrix> gens;
    for (std::size_t q = 0; q < n; ++q) {
        for (const auto& g : {gates::H(), gates::S()}) {
            ComplexMatrix m = ComplexMatrix::Identity(1, 1);
            for (std::size_t r = 0; r < n; ++r) m = kron(m, r == q ? g : gates::identity(1));
            gens.push_back(m);
        }
    }
    if (n == 2) gens.push_back(gates::CNOT());
    return gens;
}

}  // namespace

std::vector<ComplexMatrix> enumerate_clifford_group(std::size_t n) {
    if (n == 0 || n > 2) throw ValidationError("enumerate_clifford_group: n must be 1 or 2");
    const auto gens = clifford_generators(n);
    std::vector<ComplexMatrix> elems{ComplexMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n)};
    std::set<std::vector<std::int64_t>> seen{phase_key(elems.front())};
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& g : gens) {
            ComplexMatrix next = g * elems[i];
            if (seen.insert(phase_key(next)).second) elems.push_back(std::move(next));
        }
    }
    return elems;
}

ComplexMatrix random_clifford(std::size_t num_qubits, RngStream& rng) {
    if (num_qubits == 0) throw DimensionError("random_clifford: need at least one qubit");
    if (num_qubits == 1) {
        static const auto group = enumerate_clifford_group(1);
        return group[rng.index(group.size())];
    }
    if (num_qubits == 2) {
        static const auto group = enumerate_clifford_group(2);
        return group[rng.index(group.size())];
    }
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    StateVector probe = StateVector::basis(num_qubits, 0);
    const std::size_t depth = 10 * num_qubits * num_qubits;
    // Build column by column through apply_unitary on basis states.
    std::vector<std::pair<int, std::array<std::size_t, 2>>> circuit;
    for (std::size_t s = 0; s < depth; ++s) {
        const int kind = static_cast<int>(rng.index(3));
        const std::size_t a = rng.index(num_qubits);
        std::size_t b = rng.index(num_qubits - 1);
        if (b >= a) ++b;
        circuit.push_back({kind, {a, b}});
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
        probe = StateVector::basis(num_qubits, static_cast<std::uint64_t>(j));
        for (const auto& [kind, q] : circuit) {
            if (kind == 0) probe = apply_unitary(probe, gates::H(), {q[0]});
            else if (kind == 1) probe = apply_unitary(probe, gates::S(), {q[0]});
            else probe = apply_unitary(probe, gates::CNOT(), {q[0], q[1]});
        }
        u.col(j) = probe.amplitudes();
    }
    return u;
}

}  // namespace pbqc
