#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pbqc/costs.hpp"
#include "pbqc/protocols.hpp"
#include "pbqc/teleport.hpp"

namespace pbqc {

using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchema = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

/// Flat `key = value` experiment description; `#` starts a comment.
struct ExperimentConfig {
    int schema = kConfigSchema;
    std::string game = "basis";  // basis | ip
    std::size_t n = 1;
    std::string family = "haar";  // basis game: identity pauli clifford bb84 haar c3 layout
    std::string layout;           // layout JSON path for family = layout
    double eta = 0.0;
    int t = 1;
    double eta_err = 0.0;
    double eta_loss = 0.0;
    bool per_qubit_unitary = false;
    double p_loss = 0.0;
    double p_dep = 0.0;
    std::string actor = "honest";  // or a strategy identifier
    bool bank = false;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0: all hardware threads
    std::string output;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ValidationError with a "line N:" prefix on malformed input.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);

GameSpec build_spec(const ExperimentConfig& config);
ChannelModel build_channel(const ExperimentConfig& config);
std::size_t effective_threads(std::size_t requested);

struct ResultRecord {
    ExperimentConfig config;
    GameStats stats;
    double wall_clock_seconds = 0.0;

    /// Metrics first, wall clock last; thread count is not recorded.
    Json to_json() const;
    /// One row per trial.
    std::string trials_csv() const;
};

/// Runs the configured experiment and, when config.output is set, writes the
/// JSON record there (plus `<output>.trials.csv` when `write_csv`).
ResultRecord run_experiment(const ExperimentConfig& config, bool write_csv = false);

Json cost_json(const CostReport& report);

struct ComparisonRow {
    std::string quantity;
    std::string empirical;
    std::string bound;
    bool pass = false;
};

/// Rows comparing a run or pbt-bench record with a cost record.
std::vector<ComparisonRow> compare_bounds(const Json& result, const Json& cost);
std::string comparison_table(const std::vector<ComparisonRow>& rows);

/// CSV with the requested columns; a record with a "fidelity" array
/// contributes one row per point, any other record one row.
std::string emit_plot_data(const std::vector<Json>& results, const std::vector<std::string>& axes);

Json fidelity_json(const std::vector<FidelityPoint>& points);

}  // namespace pbqc
