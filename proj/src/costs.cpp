#include "pbqc/costs.hpp"

#include <algorithm>

#include "pbqc/error.hpp"

namespace pbqc {

namespace {

BigInt pow_big(unsigned base, long long exp) {
    if (exp < 0) throw ValidationError("negative exponent in cost formula");
    return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp));
}

}  // namespace

CostReport tree_cost(int n, int k) {
    if (n < 1) throw ValidationError("tree_cost: n must be at least 1");
    if (k < 2) throw ValidationError("tree_cost: k must be at least 2");
    BigInt sum = 0;
    for (int j = 0; j <= k - 2; ++j) sum += pow_big(4, static_cast<long long>(j) * n);
    CostReport r;
    const BigInt leaves = pow_big(4, static_cast<long long>(n) * (k - 2));
    r.reserved_epr = 2 * n * sum + n * leaves;
    r.bound_epr = 4 * n * leaves;
    r.formula_id = "tree";
    if (k == 2) r.direct_epr = BigInt(n);
    return r;
}

CostReport layout_cost(const CircuitLayout& layout) {
    if (layout.layers.empty()) throw ValidationError("layout_cost: no layers");
    const int n = static_cast<int>(layout.num_qubits);
    BigInt reserved = 1;
    long long level_sum = 0;
    for (const auto& layer : layout.layers) {
        BigInt layer_sum = 0;
        for (const auto& g : layer)
            if (g.level >= 2) layer_sum += tree_cost(static_cast<int>(g.targets.size()), g.level).reserved_epr;
        reserved *= layer_sum == 0 ? BigInt(1) : layer_sum;
        level_sum += std::max(layer_level(layer), 2) - 2;
    }
    CostReport r;
    r.reserved_epr = reserved;
    r.bound_epr = pow_big(4, static_cast<long long>(n) * level_sum) *
                  pow_big(static_cast<unsigned>(4 * n), static_cast<long long>(layout.layers.size()));
    r.formula_id = "layout";
    return r;
}

CostReport pbt_cost(int n, const std::vector<int>& ports) {
    if (n < 1) throw ValidationError("pbt_cost: n must be at least 1");
    if (ports.empty()) throw ValidationError("pbt_cost: no hops");
    BigInt prefix = 1, total = 0;
    for (int m : ports) {
        if (m < 1) throw ValidationError("pbt_cost: port counts must be positive");
        prefix *= m;
        total += prefix;
    }
    CostReport r;
    r.reserved_epr = n * total;
    r.formula_id = "pbt";
    return r;
}

FidelityBound pbt_fidelity_bound(const std::vector<int>& ports) {
    if (ports.empty()) throw ValidationError("pbt_fidelity_bound: no hops");
    FidelityBound b{1.0, false};
    for (int m : ports) {
        if (m < 1) throw ValidationError("pbt_fidelity_bound: port counts must be positive");
        const double f = 1.0 - 4.0 / m;
        if (f <= 0.0) b.vacuous = true;
        b.value *= std::max(f, 0.0);
    }
    b.value = std::clamp(b.value, 0.0, 1.0);
    return b;
}

CostReport sk_cost(int t, int l, bool semi_clifford, int n) {
    if (t < 1 || l < 1 || n < 1) throw ValidationError("sk_cost: t, l and n must be at least 1");
    CostReport r;
    r.reserved_epr = n * pow_big(2, static_cast<long long>(semi_clifford ? 4 : 8) * t * l);
    r.formula_id = semi_clifford ? "sk-semi-clifford" : "sk";
    return r;
}

BigInt semi_clifford_tree_degree(int n) {
    if (n < 1) throw ValidationError("semi_clifford_tree_degree: n must be at least 1");
    return pow_big(4, n) - pow_big(2, n);
}

std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace pbqc
