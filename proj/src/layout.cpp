#include "pbqc/layout.hpp"

#include <algorithm>
#include <json.hpp>

#include "pbqc/clifford.hpp"
#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/state.hpp"

namespace pbqc {

void validate_layout(const CircuitLayout& layout) {
    if (layout.num_qubits == 0 || layout.num_qubits > 8) throw ValidationError("layout: qubit count must be in [1, 8]");
    if (layout.layers.empty()) throw ValidationError("layout: no layers");
    for (const auto& layer : layout.layers) {
        if (layer.empty()) throw ValidationError("layout: empty layer");
        std::vector<bool> used(layout.num_qubits, false);
        for (const auto& g : layer) {
            if (g.targets.empty()) throw ValidationError("layout: gate without targets");
            for (auto q : g.targets) {
                if (q >= layout.num_qubits) throw ValidationError("layout: target out of range");
                if (used[q]) throw ValidationError("layout: overlapping targets within a layer");
                used[q] = true;
            }
            if (g.gate.rows() != static_cast<Eigen::Index>(std::size_t{1} << g.targets.size()))
                throw ValidationError("layout: gate dimension does not match its targets");
            if (g.level < 1 || g.level > 4) throw ValidationError("layout: declared level must be in [1, 4]");
            require_unitary(g.gate, "layout");
            if (g.targets.size() <= 2 && !hierarchy_level(g.gate, g.level).within(g.level))
                throw ValidationError("layout: gate exceeds its declared level");
        }
    }
}

ComplexMatrix layer_unitary(const LayoutLayer& layer, std::size_t num_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    ComplexMatrix out(dim, dim);
    // Column j is the layer applied to basis state j.
    for (Eigen::Index j = 0; j < dim; ++j) {
        StateVector s = StateVector::basis(num_qubits, static_cast<std::uint64_t>(j));
        for (const auto& g : layer) s = apply_unitary(s, g.gate, g.targets);
        out.col(j) = s.amplitudes();
    }
    return out;
}

ComplexMatrix layout_unitary(const CircuitLayout& layout) {
    const Eigen::Index dim = Eigen::Index{1} << layout.num_qubits;
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (const auto& layer : layout.layers) u = u * layer_unitary(layer, layout.num_qubits);
    return u;
}

int layer_level(const LayoutLayer& layer) {
    int k = 1;
    for (const auto& g : layer) k = std::max(k, g.level);
    return k;
}

CircuitLayout parse_layout_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("layout: malformed JSON: ") + e.what());
    }
    try {
        CircuitLayout layout;
        layout.num_qubits = doc.at("n").get<std::size_t>();
        for (const auto& jl : doc.at("layers")) {
            LayoutLayer layer;
            for (const auto& jg : jl) {
                LayoutGate g;
                g.targets = jg.at("targets").get<std::vector<std::size_t>>();
                g.level = jg.value("level", 3);
                if (jg.contains("matrix")) {
                    const auto entries = jg.at("matrix").get<std::vector<std::array<double, 2>>>();
                    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << g.targets.size());
                    if (entries.size() != static_cast<std::size_t>(dim * dim))
                        throw ValidationError("layout: matrix entry count does not match targets");
                    g.gate.resize(dim, dim);
                    for (Eigen::Index r = 0; r < dim; ++r)
                        for (Eigen::Index c = 0; c < dim; ++c) {
                            const auto& e = entries[static_cast<std::size_t>(r * dim + c)];
                            g.gate(r, c) = Complex(e[0], e[1]);
                        }
                } else {
                    g.gate = gates::by_name(jg.at("gate").get<std::string>());
                }
                layer.push_back(std::move(g));
            }
            layout.layers.push_back(std::move(layer));
        }
        validate_layout(layout);
        return layout;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("layout: ") + e.what());
    }
}

}  // namespace pbqc
