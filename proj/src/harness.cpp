#include "pbqc/harness.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "pbqc/attacks.hpp"
#include "pbqc/error.hpp"

namespace pbqc {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(const std::string& v, std::size_t line, const std::string& key) {
    std::istringstream in(v);
    T out{};
    in >> out;
    if (!in || !in.eof()) fail_line(line, "bad value '" + v + "' for " + key);
    if constexpr (std::is_unsigned_v<T>) {
        if (!v.empty() && v[0] == '-') fail_line(line, key + " must not be negative");
    }
    return out;
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail_line(line, "bad value '" + v + "' for " + key + " (expected true or false)");
}

std::string fmt_double(double d) {
    std::ostringstream os;
    os << std::setprecision(17) << d;
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    using Setter = std::function<void(const std::string&, std::size_t)>;
    const std::map<std::string, Setter> setters{
        {"schema", [&](const std::string& v, std::size_t l) { c.schema = parse_number<int>(v, l, "schema"); }},
        {"game", [&](const std::string& v, std::size_t) { c.game = v; }},
        {"n", [&](const std::string& v, std::size_t l) { c.n = parse_number<std::size_t>(v, l, "n"); }},
        {"family", [&](const std::string& v, std::size_t) { c.family = v; }},
        {"layout", [&](const std::string& v, std::size_t) { c.layout = v; }},
        {"eta", [&](const std::string& v, std::size_t l) { c.eta = parse_number<double>(v, l, "eta"); }},
        {"t", [&](const std::string& v, std::size_t l) { c.t = parse_number<int>(v, l, "t"); }},
        {"eta_err", [&](const std::string& v, std::size_t l) { c.eta_err = parse_number<double>(v, l, "eta_err"); }},
        {"eta_loss", [&](const std::string& v, std::size_t l) { c.eta_loss = parse_number<double>(v, l, "eta_loss"); }},
        {"per_qubit_unitary",
         [&](const std::string& v, std::size_t l) { c.per_qubit_unitary = parse_bool(v, l, "per_qubit_unitary"); }},
        {"p_loss", [&](const std::string& v, std::size_t l) { c.p_loss = parse_number<double>(v, l, "p_loss"); }},
        {"p_dep", [&](const std::string& v, std::size_t l) { c.p_dep = parse_number<double>(v, l, "p_dep"); }},
        {"actor", [&](const std::string& v, std::size_t) { c.actor = v; }},
        {"bank", [&](const std::string& v, std::size_t l) { c.bank = parse_bool(v, l, "bank"); }},
        {"trials", [&](const std::string& v, std::size_t l) { c.trials = parse_number<std::size_t>(v, l, "trials"); }},
        {"seed", [&](const std::string& v, std::size_t l) { c.seed = parse_number<std::uint64_t>(v, l, "seed"); }},
        {"threads", [&](const std::string& v, std::size_t l) { c.threads = parse_number<std::size_t>(v, l, "threads"); }},
        {"output", [&](const std::string& v, std::size_t) { c.output = v; }},
    };

    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) fail_line(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second) fail_line(line_no, "duplicate key '" + key + "'");
        it->second(value, line_no);
    }
    if (!seen.count("schema")) throw ValidationError("line 1: missing 'schema = 1'");
    if (c.schema != kConfigSchema) throw ValidationError("unsupported schema " + std::to_string(c.schema));
    if (c.game != "basis" && c.game != "ip") throw ValidationError("game must be 'basis' or 'ip'");
    if (c.trials == 0) throw ValidationError("trials must be at least 1");
    if (c.actor.empty()) throw ValidationError("actor must not be empty");
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "schema = " << c.schema << "\n"
       << "game = " << c.game << "\n"
       << "n = " << c.n << "\n"
       << "family = " << c.family << "\n";
    if (!c.layout.empty()) os << "layout = " << c.layout << "\n";
    os << "eta = " << fmt_double(c.eta) << "\n"
       << "t = " << c.t << "\n"
       << "eta_err = " << fmt_double(c.eta_err) << "\n"
       << "eta_loss = " << fmt_double(c.eta_loss) << "\n"
       << "per_qubit_unitary = " << (c.per_qubit_unitary ? "true" : "false") << "\n"
       << "p_loss = " << fmt_double(c.p_loss) << "\n"
       << "p_dep = " << fmt_double(c.p_dep) << "\n"
       << "actor = " << c.actor << "\n"
       << "bank = " << (c.bank ? "true" : "false") << "\n"
       << "trials = " << c.trials << "\n"
       << "seed = " << c.seed << "\n"
       << "threads = " << c.threads << "\n";
    if (!c.output.empty()) os << "output = " << c.output << "\n";
    return os.str();
}

GameSpec build_spec(const ExperimentConfig& c) {
    if (c.game == "ip") {
        IPGameSpec s{c.n, c.t, c.eta_err, c.eta_loss, c.per_qubit_unitary};
        validate_spec(s);
        return s;
    }
    if (c.game != "basis") throw ValidationError("game must be 'basis' or 'ip'");
    BasisGameSpec s;
    s.n = c.n;
    s.eta = c.eta;
    if (c.family == "layout") {
        if (c.layout.empty()) throw ValidationError("family = layout needs a 'layout' path");
        s.family.kind = FamilyKind::Layout;
        s.family.layout = parse_layout_json(read_file(c.layout));
    } else {
        s.family = UnitaryFamily::named(c.family);
    }
    validate_spec(s);
    return s;
}

ChannelModel build_channel(const ExperimentConfig& c) {
    ChannelModel ch{c.p_loss, c.p_dep};
    validate_channel(ch);
    return ch;
}

std::size_t effective_threads(std::size_t requested) {
    if (requested) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

Json ResultRecord::to_json() const {
    const auto& s = stats;
    Json spec{{"game", config.game}, {"n", config.n}};
    if (config.game == "basis") {
        spec["family"] = config.family;
        if (!config.layout.empty()) spec["layout"] = config.layout;
        spec["eta"] = config.eta;
    } else {
        spec["t"] = config.t;
        spec["eta_err"] = config.eta_err;
        spec["eta_loss"] = config.eta_loss;
        spec["per_qubit_unitary"] = config.per_qubit_unitary;
    }
    Json hist = Json::object();
    for (const auto& [k, v] : s.error_histogram) hist[std::to_string(k)] = v;
    Json j;
    j["artifact_version"] = kArtifactVersion;
    j["spec"] = spec;
    j["channel"] = {{"p_loss", config.p_loss}, {"p_dep", config.p_dep}};
    j["actor"] = config.actor;
    j["bank"] = config.bank;
    j["trials"] = s.trials;
    j["seed"] = config.seed;
    j["win_rate"] = s.win_rate;
    j["stderr"] = s.win_stderr;
    j["mean_errors"] = s.mean_errors;
    j["errors_stderr"] = s.errors_stderr;
    j["mean_error_fraction"] = s.mean_error_fraction;
    j["mean_answered_error_fraction"] = s.mean_answered_error_fraction;
    j["mean_losses"] = s.mean_losses;
    j["mean_epr"] = s.mean_epr_consumed;
    j["max_epr_consumed"] = s.max_epr_consumed;
    j["reserved_epr"] = to_string(s.reserved_epr);
    j["ledger_violations"] = s.ledger_violations;
    j["strategy_failures"] = s.strategy_failures;
    j["error_histogram"] = hist;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
}

std::string ResultRecord::trials_csv() const {
    std::ostringstream os;
    os << "trial,accepted,errors,losses,answered,answers_equal,epr_consumed,strategy_failed\n";
    for (const auto& r : stats.records) {
        os << r.trial << ',' << r.accepted << ',' << r.errors << ',' << r.losses << ',' << r.answered << ','
           << r.answers_equal << ',' << r.epr_consumed << ',' << r.strategy_failed << '\n';
    }
    return os.str();
}

ResultRecord run_experiment(const ExperimentConfig& config, bool write_csv) {
    const GameSpec spec = build_spec(config);
    const ChannelModel channel = build_channel(config);
    std::unique_ptr<CoalitionStrategy> strategy;
    if (config.actor != "honest") strategy = make_strategy(config.actor);
    const auto start = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.config = config;
    rec.stats = run_game(spec, strategy.get(), channel,
                         RunOptions{config.trials, config.seed, effective_threads(config.threads), config.bank});
    rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.output.empty()) {
        write_file(config.output, rec.to_json().dump(2) + "\n");
        if (write_csv) write_file(config.output + ".trials.csv", rec.trials_csv());
    }
    return rec;
}

Json cost_json(const CostReport& r) {
    Json j;
    j["formula_id"] = r.formula_id;
    j["reserved_epr"] = to_string(r.reserved_epr);
    if (r.bound_epr) j["bound_epr"] = to_string(*r.bound_epr);
    if (r.direct_epr) j["direct_epr"] = to_string(*r.direct_epr);
    return j;
}

namespace {

BigInt big_field(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) return BigInt(v.get<std::string>());
    if (v.is_number_unsigned()) return BigInt(v.get<std::uint64_t>());
    if (v.is_number_integer()) return BigInt(v.get<std::int64_t>());
    throw ValidationError(std::string("field '") + key + "' is not an integer");
}

std::string fmt_short(double d) {
    std::ostringstream os;
    os << std::setprecision(6) << d;
    return os.str();
}

}  // namespace

std::vector<ComparisonRow> compare_bounds(const Json& result, const Json& cost) {
    std::vector<ComparisonRow> rows;
    try {
        if (result.contains("reserved_epr")) {
            const BigInt reserved = big_field(result, "reserved_epr");
            if (cost.contains("reserved_epr")) {
                const BigInt formula = big_field(cost, "reserved_epr");
                rows.push_back({"reserved_epr == formula", to_string(reserved), to_string(formula), reserved == formula});
            }
            if (cost.contains("bound_epr")) {
                const BigInt bound = big_field(cost, "bound_epr");
                rows.push_back({"reserved_epr <= bound", to_string(reserved), to_string(bound), reserved <= bound});
            }
            if (result.contains("max_epr_consumed")) {
                const BigInt consumed = big_field(result, "max_epr_consumed");
                rows.push_back({"max consumed <= reserved", to_string(consumed), to_string(reserved), consumed <= reserved});
            }
        }
        if (result.contains("fidelity") && cost.contains("fidelity_bound") && cost.contains("ports")) {
            const auto ports = cost.at("ports").get<std::vector<int>>();
            const double bound = cost.at("fidelity_bound").get<double>();
            for (const auto& p : result.at("fidelity")) {
                if (ports.size() != 1 || p.at("num_ports").get<int>() != ports[0]) continue;
                const double mean = p.at("mean").get<double>();
                const double se = p.at("std_error").get<double>();
                rows.push_back({"pbt fidelity N=" + std::to_string(ports[0]) + " (mean + 3se >= bound)", fmt_short(mean),
                                fmt_short(bound), mean + 3 * se >= bound});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed record: ") + e.what());
    }
    if (rows.empty()) throw ValidationError("nothing comparable between the result and the cost record");
    return rows;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "quantity,empirical,bound,status\n";
    for (const auto& r : rows) os << '"' << r.quantity << "\"," << r.empirical << ',' << r.bound << ',' << (r.pass ? "pass" : "fail") << '\n';
    return os.str();
}

namespace {

const Json* lookup(const Json& record, const Json* point, const std::string& key) {
    if (point && point->contains(key)) return &point->at(key);
    if (record.contains(key)) return &record.at(key);
    for (const char* nested : {"spec", "channel"}) {
        if (record.contains(nested) && record.at(nested).contains(key)) return &record.at(nested).at(key);
    }
    return nullptr;
}

std::string cell(const Json* v) {
    if (!v) return "";
    if (v->is_string()) return v->get<std::string>();
    if (v->is_number_float()) return fmt_double(v->get<double>());
    return v->dump();
}

}  // namespace

std::string emit_plot_data(const std::vector<Json>& results, const std::vector<std::string>& axes) {
    if (axes.empty()) throw ValidationError("no axes given");
    std::set<std::string> uniq;
    for (const auto& a : axes) {
        if (a.empty()) throw ValidationError("empty axis name");
        if (!uniq.insert(a).second) throw ValidationError("duplicate axis '" + a + "'");
    }
    std::ostringstream os;
    for (std::size_t i = 0; i < axes.size(); ++i) os << (i ? "," : "") << axes[i];
    os << '\n';
    const auto row = [&](const Json& rec, const Json* point) {
        for (std::size_t i = 0; i < axes.size(); ++i) os << (i ? "," : "") << cell(lookup(rec, point, axes[i]));
        os << '\n';
    };
    for (const auto& rec : results) {
        if (rec.contains("fidelity") && rec.at("fidelity").is_array()) {
            for (const auto& p : rec.at("fidelity")) row(rec, &p);
        } else {
            row(rec, nullptr);
        }
    }
    return os.str();
}

Json fidelity_json(const std::vector<FidelityPoint>& points) {
    Json arr = Json::array();
    for (const auto& p : points) {
        const auto b = pbt_fidelity_bound({static_cast<int>(p.num_ports)});
        arr.push_back({{"num_ports", p.num_ports},
                       {"mean", p.mean},
                       {"std_error", p.std_error},
                       {"failure_rate", p.failure_rate},
                       {"bound", b.value},
                       {"bound_vacuous", b.vacuous}});
    }
    return Json{{"artifact_version", kArtifactVersion}, {"fidelity", arr}};
}

}  // namespace pbqc
