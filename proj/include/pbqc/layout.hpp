#pragma once

#include <string_view>
#include <vector>

#include "pbqc/types.hpp"

namespace pbqc {

struct LayoutGate {
    ComplexMatrix gate;
    std::vector<std::size_t> targets;
    int level = 3;  // declared hierarchy level
};

using LayoutLayer = std::vector<LayoutGate>;

/// Fixed circuit layout. The challenge unitary is U = L_1 · L_2 ··· L_d, so
/// a prover undoing it applies L_1^dagger first.
struct CircuitLayout {
    std::size_t num_qubits = 1;
    std::vector<LayoutLayer> layers;
};

/// Checks disjoint targets per layer, gate dimensions and declared levels
/// (hierarchy_level <= declared); throws ValidationError.
void validate_layout(const CircuitLayout& layout);

/// Full unitary of one layer on the register.
ComplexMatrix layer_unitary(const LayoutLayer& layer, std::size_t num_qubits);

/// Product L_1 · L_2 ··· L_d (layer 0 leftmost).
ComplexMatrix layout_unitary(const CircuitLayout& layout);

/// Largest declared level in a layer.
int layer_level(const LayoutLayer& layer);

/// JSON layout document: {"n": 1, "layers": [[{"gate": "T", "targets": [0], "level": 3}]]}.
/// A gate may instead carry "matrix": [[re, im], ...] in row-major order.
CircuitLayout parse_layout_json(std::string_view text);

}  // namespace pbqc
