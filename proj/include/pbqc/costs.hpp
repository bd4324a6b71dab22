#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pbqc/layout.hpp"

namespace pbqc {

using BigInt = boost::multiprecision::cpp_int;

struct CostReport {
    BigInt reserved_epr;
    std::optional<BigInt> bound_epr;
    std::string formula_id;
    /// Tighter direct strategy count where one exists (tree_cost at k = 2).
    std::optional<BigInt> direct_epr;
};

/// 2n·Σ_{j=0}^{k-2} 4^{jn} + n·4^{n(k-2)}, bound 4n·4^{n(k-2)}. Requires n >= 1, k >= 2.
CostReport tree_cost(int n, int k);

/// Lemma-style composition: product over layers of the summed per-gate tree
/// costs. Pauli-only gates are free; a layer of Paulis contributes factor 1.
/// Bound 4^{nΣ(k_i-2)}·(4n)^d with k_i the largest declared level of layer i.
CostReport layout_cost(const CircuitLayout& layout);

/// n·(m_1 + m_1 m_2 + ... + m_1···m_h).
CostReport pbt_cost(int n, const std::vector<int>& ports);

struct FidelityBound {
    double value = 0.0;
    bool vacuous = false;  // some factor 1 - 4/m_i was <= 0
};

/// ∏ (1 - 4/m_i) clamped to [0, 1].
FidelityBound pbt_fidelity_bound(const std::vector<int>& ports);

/// n·2^{8tl}, or n·2^{4tl} with the semi-Clifford flag.
CostReport sk_cost(int t, int l, bool semi_clifford, int n = 1);

/// 4^n - 2^n.
BigInt semi_clifford_tree_degree(int n);

std::string to_string(const BigInt& v);

}  // namespace pbqc
