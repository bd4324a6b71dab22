// Command-line front end: experiments, cost formulas, SK compilation, PBT
// benchmarks, bound comparisons and plot data.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pbqc/attacks.hpp"
#include "pbqc/costs.hpp"
#include "pbqc/error.hpp"
#include "pbqc/harness.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/sk.hpp"
#include "pbqc/teleport.hpp"

using namespace pbqc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kBound = 3 };

struct BoundFailure : Error {
    explicit BoundFailure(const std::string& what) : Error("bound", what) {}
};

struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    std::string out;
    std::string format = "json";
};

std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json(const std::string& path) {
    try {
        return Json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(f.out);
    if (!out) throw ValidationError("cannot write '" + f.out + "'");
    out << text;
}

std::string json_as_csv(const Json& j) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    return os.str();
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& params, std::size_t from) {
    std::map<std::string, std::string> kv;
    for (std::size_t i = from; i < params.size(); ++i) {
        const auto eq = params[i].find('=');
        if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + params[i] + "'");
        kv[params[i].substr(0, eq)] = params[i].substr(eq + 1);
    }
    return kv;
}

int int_param(const std::map<std::string, std::string>& kv, const std::string& key, std::optional<int> fallback = {}) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ValidationError("missing parameter '" + key + "'");
    }
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(it->second, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != it->second.size()) throw ValidationError("bad integer for '" + key + "'");
    return v;
}

std::vector<int> int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        try {
            out.push_back(std::stoi(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ValidationError("bad integer list '" + s + "'");
    }
    if (out.empty()) throw ValidationError("empty integer list");
    return out;
}

int cmd_run(const std::string& path, const Flags& f) {
    ExperimentConfig c = parse_config(slurp(path));
    if (f.seed) c.seed = *f.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.threads) c.threads = *f.threads;
    if (!f.out.empty()) c.output = f.out;
    const bool csv = f.format == "csv";
    const ResultRecord rec = run_experiment(c, csv);
    std::cout << (csv ? rec.trials_csv() : rec.to_json().dump(2) + "\n");
    if (rec.stats.ledger_violations > 0) {
        throw BoundFailure(std::to_string(rec.stats.ledger_violations) + " trials consumed more EPR pairs than reserved");
    }
    return kOk;
}

int cmd_cost(const std::vector<std::string>& params, const Flags& f) {
    if (params.empty()) throw ValidationError("cost needs a formula: tree, layout, pbt, sk or semi-degree");
    const std::string kind = params[0];
    const auto kv = key_values(params, 1);
    Json j;
    if (kind == "tree") {
        j = cost_json(tree_cost(int_param(kv, "n"), int_param(kv, "k")));
    } else if (kind == "layout") {
        if (!kv.count("file")) throw ValidationError("missing parameter 'file'");
        j = cost_json(layout_cost(parse_layout_json(slurp(kv.at("file")))));
    } else if (kind == "pbt") {
        if (!kv.count("ports")) throw ValidationError("missing parameter 'ports'");
        const auto ports = int_list(kv.at("ports"));
        j = cost_json(pbt_cost(int_param(kv, "n", 1), ports));
        const auto b = pbt_fidelity_bound(ports);
        j["ports"] = ports;
        j["fidelity_bound"] = b.value;
        j["fidelity_bound_vacuous"] = b.vacuous;
    } else if (kind == "sk") {
        const auto semi = kv.count("semi") ? kv.at("semi") : "true";
        if (semi != "true" && semi != "false") throw ValidationError("semi must be true or false");
        j = cost_json(sk_cost(int_param(kv, "t"), int_param(kv, "l"), semi == "true", int_param(kv, "n", 1)));
    } else if (kind == "semi-degree") {
        j = Json{{"formula_id", "semi_clifford_tree_degree"}, {"degree", to_string(semi_clifford_tree_degree(int_param(kv, "n")))}};
    } else {
        throw ValidationError("unknown cost formula '" + kind + "'");
    }
    emit(f, f.format == "csv" ? json_as_csv(j) : j.dump(2) + "\n");
    return kOk;
}

int cmd_sk_compile(const std::vector<std::string>& tokens, int depth, int l0, const Flags& f) {
    std::vector<double> v;
    for (const auto& tok : tokens) {
        std::string s = tok;
        for (auto& c : s) {
            if (c == ',') c = ' ';
        }
        std::istringstream in(s);
        for (std::string w; in >> w;) {
            std::size_t used = 0;
            try {
                v.push_back(std::stod(w, &used));
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != w.size()) throw ValidationError("bad number '" + w + "'");
        }
    }
    if (v.size() != 8) throw ValidationError("expected 8 real numbers (re, im of u00 u01 u10 u11), got " + std::to_string(v.size()));
    ComplexMatrix u(2, 2);
    u << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]), Complex(v[6], v[7]);
    // Printed matrices carry few digits; snap near-unitaries to the closest unitary.
    const double defect = (u.adjoint() * u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    if (defect > 1e-6) throw ValidationError("input is not unitary (defect " + std::to_string(defect) + ")");
    Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
    const EpsilonNet net = build_net(l0);
    const GateWord w = sk_decompose(u, depth, net);
    const Json j{{"word", w.to_string()},
                 {"length", w.size()},
                 {"padded_length", padded_length(depth, l0)},
                 {"distance", phase_invariant_distance(w.product(), u)},
                 {"error_bound", net.error_bound(depth)},
                 {"depth", depth},
                 {"l0", l0}};
    emit(f, f.format == "csv" ? json_as_csv(j) : j.dump(2) + "\n");
    return kOk;
}

int cmd_pbt_bench(const std::string& ports_text, const Flags& f) {
    std::vector<std::size_t> ports;
    for (int p : int_list(ports_text)) {
        if (p < 0) throw ValidationError("port counts must be positive");
        ports.push_back(static_cast<std::size_t>(p));
    }
    RngStream rng(f.seed.value_or(1));
    const auto points = pbt_fidelity_curve(ports, f.trials.value_or(1000), rng);
    const Json j = fidelity_json(points);
    if (f.format == "csv") {
        emit(f, emit_plot_data({j}, {"num_ports", "mean", "std_error", "failure_rate", "bound"}));
    } else {
        emit(f, j.dump(2) + "\n");
    }
    return kOk;
}

int cmd_compare(const std::string& result_path, const std::string& cost_path, const Flags& f) {
    const auto rows = compare_bounds(read_json(result_path), read_json(cost_path));
    if (f.format == "csv") {
        emit(f, comparison_table(rows));
    } else {
        Json arr = Json::array();
        for (const auto& r : rows) {
            arr.push_back({{"quantity", r.quantity}, {"empirical", r.empirical}, {"bound", r.bound}, {"pass", r.pass}});
        }
        emit(f, arr.dump(2) + "\n");
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    if (failed) throw BoundFailure(std::to_string(failed) + " of " + std::to_string(rows.size()) + " bound checks failed");
    return kOk;
}

int cmd_plot(const std::vector<std::string>& paths, const std::string& axes_text, const Flags& f) {
    std::vector<std::string> axes;
    std::stringstream ss(axes_text);
    for (std::string a; std::getline(ss, a, ',');) axes.push_back(a);
    std::vector<Json> records;
    for (const auto& p : paths) records.push_back(read_json(p));
    emit(f, emit_plot_data(records, axes));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Position-verification attack simulator"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;
    std::size_t trials = 0, threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed")->check(CLI::NonNegativeNumber);
    auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0: all cores)");
    app.add_option("--out", flags.out, "Output file");
    app.add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.fallthrough();

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("config", config_path)->required();

    std::vector<std::string> cost_params;
    auto* cost = app.add_subcommand("cost", "Evaluate a cost formula, e.g. `cost tree n=1 k=3`");
    cost->add_option("params", cost_params)->required();

    std::vector<std::string> unitary;
    int depth = 2, l0 = 12;
    auto* sk = app.add_subcommand("sk-compile", "Compile a 2x2 unitary (re/im of u00 u01 u10 u11)");
    sk->add_option("unitary", unitary)->required()->allow_extra_args();
    sk->add_option("--depth", depth, "Recursion depth");
    sk->add_option("--l0", l0, "Base net word length");

    std::string ports_text;
    auto* bench = app.add_subcommand("pbt-bench", "Mean PBT fidelity over Haar inputs");
    bench->add_option("--ports", ports_text, "Port count or comma list")->required();

    std::string result_path, cost_path;
    auto* compare = app.add_subcommand("compare", "Check a result record against a cost record");
    compare->add_option("result", result_path)->required();
    compare->add_option("cost", cost_path)->required();

    std::vector<std::string> plot_paths;
    std::string axes = "num_ports,mean";
    auto* plot = app.add_subcommand("plot", "Emit CSV plot data from result records");
    plot->add_option("results", plot_paths);
    plot->add_option("--axes", axes, "Comma-separated column names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << "\n";
        return kUsage;
    }
    if (*seed_opt) flags.seed = seed;
    if (*trials_opt) flags.trials = trials;
    if (*threads_opt) flags.threads = threads;

    try {
        if (*run) return cmd_run(config_path, flags);
        if (*cost) return cmd_cost(cost_params, flags);
        if (*sk) return cmd_sk_compile(unitary, depth, l0, flags);
        if (*bench) return cmd_pbt_bench(ports_text, flags);
        if (*compare) return cmd_compare(result_path, cost_path, flags);
        if (*plot) return cmd_plot(plot_paths, axes, flags);
    } catch (const BoundFailure& e) {
        std::cerr << "error: bound: " << one_line(e.what()) << "\n";
        return kBound;
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << "\n";
        return kValidation;
    }
    return kUsage;
}
