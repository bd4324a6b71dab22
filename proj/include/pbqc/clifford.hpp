#pragma once

#include <optional>

#include "pbqc/pauli.hpp"
#include "pbqc/rng.hpp"
#include "pbqc/types.hpp"

namespace pbqc {

inline constexpr double kHierarchyTol = 1e-8;

/// Smallest level k <= k_max with U in C_k, or empty when U is not in C_{k_max}.
struct HierarchyLevel {
    std::optional<int> level;
    int k_max = 0;

    bool within(int k) const { return level && *level <= k; }
};

/// U X_i U^dagger and U Z_i U^dagger are all Pauli.
bool is_clifford(const ComplexMatrix& u, double tol = kHierarchyTol);

/// Membership predicate for C_k: level 1 is the Pauli group (up to global
/// phase); above that every Hermitian Pauli is conjugated and tested one level
/// down. No generator shortcut is taken because C_k is not a group for k >= 3.
bool in_clifford_level(const ComplexMatrix& u, int k, double tol = kHierarchyTol);

/// Requires n <= 2 and 1 <= k_max <= 4.
HierarchyLevel hierarchy_level(const ComplexMatrix& u, int k_max, double tol = kHierarchyTol);

/// Some maximal abelian subgroup of the phaseless Pauli group is mapped into
/// the Pauli group by conjugation. Requires n <= 2.
bool is_semi_clifford(const ComplexMatrix& u, double tol = kHierarchyTol);

/// Number of the 4 single-qubit Paulis P with U P U^dagger Pauli. Requires n = 1.
int count_pauli_preserving(const ComplexMatrix& u, double tol = kHierarchyTol);

/// Breadth-first closure of H, S (and CNOT) deduplicated up to phase; n <= 2.
std::vector<ComplexMatrix> enumerate_clifford_group(std::size_t num_qubits);

/// Uniform over the Clifford group (modulo phase) for n <= 2; for larger n a
/// random H/S/CNOT circuit of depth 10n^2.
ComplexMatrix random_clifford(std::size_t num_qubits, RngStream& rng);

/// U P U^dagger.
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& p);

}  // namespace pbqc
