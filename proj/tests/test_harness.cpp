#include <gtest/gtest.h>

#include "pbqc/attacks.hpp"
#include "pbqc/error.hpp"
#include "pbqc/harness.hpp"

using namespace pbqc;

namespace {

const char* kMinimal = "schema = 1\ngame = basis\nn = 2\nfamily = haar\n";

std::string without_clock(Json j) {
    j.erase("wall_clock_seconds");
    return j.dump();
}

}  // namespace

TEST(Config, MinimalFillsDefaults) {
    const auto c = parse_config(kMinimal);
    EXPECT_EQ(c.n, 2u);
    EXPECT_EQ(c.eta, 0.0);
    EXPECT_EQ(c.p_loss, 0.0);
    EXPECT_EQ(c.p_dep, 0.0);
    EXPECT_EQ(c.trials, 1000u);
    EXPECT_EQ(c.actor, "honest");
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("schema = 1\ntrials = -5\n"), ValidationError);
    EXPECT_THROW(parse_config("schema = 1\ntrials = 0\n"), ValidationError);
    EXPECT_THROW(parse_config("game = basis\n"), ValidationError);
    EXPECT_THROW(parse_config("schema = 2\n"), ValidationError);
    EXPECT_THROW(parse_config("schema = 1\nn = 1\nn = 2\n"), ValidationError);
    EXPECT_THROW(parse_config("schema = 1\nbank = yes\n"), ValidationError);
    try {
        parse_config("schema = 1\n# comment\ncolour = blue\n");
        FAIL() << "unknown key accepted";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
    }
    try {
        parse_config("schema = 1\nn 4\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Config, RoundTrip) {
    ExperimentConfig c;
    c.game = "ip";
    c.n = 7;
    c.t = 3;
    c.eta_err = 0.1;
    c.eta_loss = 1.0 / 3.0;
    c.per_qubit_unitary = true;
    c.p_loss = 0.25;
    c.p_dep = 0.015625;
    c.actor = "pbt:4,5,6";
    c.bank = true;
    c.trials = 77;
    c.seed = 12345678901234ULL;
    c.threads = 3;
    c.output = "out.json";
    EXPECT_EQ(parse_config(serialize_config(c)), c);
    const auto m = parse_config(kMinimal);
    EXPECT_EQ(parse_config(serialize_config(m)), m);
}

TEST(Experiment, HonestWinsAndIsDeterministic) {
    auto c = parse_config(kMinimal);
    c.trials = 200;
    c.threads = 1;
    const auto a = run_experiment(c);
    EXPECT_EQ(a.stats.win_rate, 1.0);
    c.threads = 3;
    const auto b = run_experiment(c);
    EXPECT_EQ(without_clock(a.to_json()), without_clock(b.to_json()));
    EXPECT_EQ(a.trials_csv(), b.trials_csv());
}

TEST(Experiment, StrategyValidationSurfaces) {
    auto c = parse_config(kMinimal);
    c.n = 1;
    c.actor = "tree:3";
    EXPECT_THROW(run_experiment(c), ValidationError);
    c.actor = "no-such-attack";
    EXPECT_THROW(run_experiment(c), ValidationError);
    c.actor = "honest";
    c.family = "layout";
    EXPECT_THROW(run_experiment(c), ValidationError);
}

TEST(Compare, TreeLedgerAgainstCosts) {
    auto c = parse_config("schema = 1\nfamily = c3\nactor = tree:3\ntrials = 50\n");
    const Json result = run_experiment(c).to_json();
    const Json cost = cost_json(tree_cost(1, 3));
    const auto rows = compare_bounds(result, cost);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.quantity;

    Json fake = result;
    fake["reserved_epr"] = "20";
    bool any_fail = false;
    for (const auto& r : compare_bounds(fake, cost)) any_fail |= !r.pass;
    EXPECT_TRUE(any_fail);
    EXPECT_THROW(compare_bounds(Json::object(), cost), ValidationError);
}

TEST(Compare, PbtFidelityAgainstBound) {
    RngStream rng(2);
    const Json bench = fidelity_json(pbt_fidelity_curve({8}, 300, rng));
    Json cost = cost_json(pbt_cost(1, {8}));
    cost["ports"] = std::vector<int>{8};
    cost["fidelity_bound"] = pbt_fidelity_bound({8}).value;
    const auto rows = compare_bounds(bench, cost);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].pass);
}

TEST(Plot, FidelitySweepAndEdgeCases) {
    RngStream rng(3);
    const Json bench = fidelity_json(pbt_fidelity_curve({2, 4, 6, 8}, 300, rng));
    const std::string csv = emit_plot_data({bench}, {"num_ports", "mean"});
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "num_ports,mean");
    double prev = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const double mean = std::stod(line.substr(line.find(',') + 1));
        EXPECT_GT(mean, prev);
        prev = mean;
        ++rows;
    }
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(emit_plot_data({}, {"a", "b"}), "a,b\n");
    EXPECT_THROW(emit_plot_data({}, {"a", "a"}), ValidationError);
    EXPECT_THROW(emit_plot_data({}, {}), ValidationError);
}
