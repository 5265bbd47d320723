#pragma once

// Command-line front end: TOML configuration in, JSON reports and CSV
// curves out.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "ritax/adjust.hpp"
#include "ritax/analysis.hpp"
#include "ritax/errors.hpp"
#include "ritax/model.hpp"
#include "ritax/properties.hpp"
#include "ritax/solver.hpp"

namespace ritax::cli {

using Json = nlohmann::ordered_json;

struct Range {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;

    double at(int k) const noexcept {
        return steps <= 1 ? min : min + (max - min) * static_cast<double>(k) / (steps - 1);
    }
};

struct SweepConfig {
    Range theta2{0.05, 1.0, 20};
    Range e2{0.5, 5.0, 10};
};

struct RunConfig {
    Economy economy{GoodSpec(1.0), GoodSpec(1.0)};
    double revenue = 0.0;
    Box trace_box{-0.5, 2.0, -0.5, 2.0};
    SweepConfig sweep;
    MuPathKind lumpsum_path = MuPathKind::Perceived;
    std::optional<double> existence_e_i;
    std::optional<double> existence_e_j;
};

// ---------------------------------------------------------------------------
// Configuration

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { fail(ErrorKind::Config, msg); }

inline void check_keys(const toml::table& t, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [k, v] : t) {
        (void)v;
        if (std::find(allowed.begin(), allowed.end(), k.str()) == allowed.end())
            config_error("unknown key '" + std::string(k.str()) + "' in " + std::string(where));
    }
}

inline std::optional<double> opt_number(const toml::table& t, std::string_view key, std::string_view where) {
    const toml::node* n = t.get(key);
    if (!n)
        return std::nullopt;
    if (auto v = n->value<double>())
        return *v;
    config_error("'" + std::string(key) + "' in " + std::string(where) + " must be a number");
}

inline double number(const toml::table& t, std::string_view key, std::string_view where) {
    if (auto v = opt_number(t, key, where))
        return *v;
    config_error("missing '" + std::string(key) + "' in " + std::string(where));
}

inline const toml::table* opt_table(const toml::table& t, std::string_view key) {
    const toml::node* n = t.get(key);
    if (!n)
        return nullptr;
    if (!n->is_table())
        config_error("'" + std::string(key) + "' must be a table");
    return n->as_table();
}

inline Range read_range(const toml::table& t, std::string_view prefix, Range def) {
    const std::string p(prefix);
    def.min = opt_number(t, p + "_min", "[sweep]").value_or(def.min);
    def.max = opt_number(t, p + "_max", "[sweep]").value_or(def.max);
    if (auto s = opt_number(t, p + "_steps", "[sweep]")) {
        if (*s < 1 || *s != std::floor(*s))
            config_error(p + "_steps must be a positive integer");
        def.steps = static_cast<int>(*s);
    }
    if (def.max < def.min)
        config_error(p + "_max must not be below " + p + "_min");
    return def;
}

} // namespace detail

inline RunConfig parse_config(std::string_view text, std::string_view source = "config") {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        detail::config_error(std::string(e.description()) + " at line " + std::to_string(e.source().begin.line));
    }
    using detail::config_error;
    detail::check_keys(root, {"revenue", "economy", "trace", "sweep", "lumpsum", "existence"}, "top level");

    RunConfig cfg;
    cfg.revenue = detail::number(root, "revenue", "top level");
    if (!(cfg.revenue >= 0.0))
        config_error("revenue must be >= 0");

    const toml::table* econ = detail::opt_table(root, "economy");
    if (!econ)
        config_error("missing [economy] table");
    detail::check_keys(*econ, {"mode", "goods"}, "[economy]");
    PerceptionMode mode = PerceptionMode::TaxedOnly;
    if (const toml::node* m = econ->get("mode")) {
        const auto s = m->value<std::string>();
        if (s == "taxed_only")
            mode = PerceptionMode::TaxedOnly;
        else if (s == "symmetric")
            mode = PerceptionMode::Symmetric;
        else
            config_error("economy.mode must be \"taxed_only\" or \"symmetric\"");
    }
    const toml::array* goods = econ->get_as<toml::array>("goods");
    if (!goods || goods->size() != 2)
        config_error("economy.goods must list exactly two goods");
    std::vector<GoodSpec> gs;
    for (std::size_t i = 0; i < 2; ++i) {
        const toml::table* g = goods->get(i)->as_table();
        if (!g)
            config_error("each entry of economy.goods must be a table");
        const std::string where = "economy.goods[" + std::to_string(i) + "]";
        detail::check_keys(*g, {"e", "theta"}, where);
        try {
            gs.emplace_back(detail::number(*g, "e", where), detail::opt_number(*g, "theta", where).value_or(1.0));
        } catch (const Error& e) {
            config_error(where + ": " + e.what());
        }
    }
    cfg.economy = Economy(gs[0], gs[1], mode);

    if (const toml::table* t = detail::opt_table(root, "trace")) {
        detail::check_keys(*t, {"t1_min", "t1_max", "t2_min", "t2_max"}, "[trace]");
        Box& b = cfg.trace_box;
        b.t1_min = detail::opt_number(*t, "t1_min", "[trace]").value_or(b.t1_min);
        b.t1_max = detail::opt_number(*t, "t1_max", "[trace]").value_or(b.t1_max);
        b.t2_min = detail::opt_number(*t, "t2_min", "[trace]").value_or(b.t2_min);
        b.t2_max = detail::opt_number(*t, "t2_max", "[trace]").value_or(b.t2_max);
        if (b.t1_min < kTaxMin || b.t2_min < kTaxMin || b.t1_max > kTaxMax || b.t2_max > kTaxMax)
            config_error("[trace] bounds must lie within [-0.99, 100]");
        if (!(b.t1_min < 0.0 && b.t1_max > 0.0 && b.t2_min <= 0.0 && b.t2_max > 0.0))
            config_error("[trace] box must contain the origin");
    }
    if (const toml::table* t = detail::opt_table(root, "sweep")) {
        detail::check_keys(*t, {"theta2_min", "theta2_max", "theta2_steps", "e2_min", "e2_max", "e2_steps"},
                           "[sweep]");
        cfg.sweep.theta2 = detail::read_range(*t, "theta2", cfg.sweep.theta2);
        cfg.sweep.e2 = detail::read_range(*t, "e2", cfg.sweep.e2);
        if (!(cfg.sweep.theta2.min > 0.0 && cfg.sweep.theta2.max <= 1.0 && cfg.sweep.e2.min > 0.0))
            config_error("[sweep] needs theta2 in (0, 1] and e2 > 0");
    }
    if (const toml::table* t = detail::opt_table(root, "lumpsum")) {
        detail::check_keys(*t, {"path"}, "[lumpsum]");
        if (const toml::node* p = t->get("path")) {
            const auto s = p->value<std::string>();
            if (s == "perceived")
                cfg.lumpsum_path = MuPathKind::Perceived;
            else if (s == "adjusted")
                cfg.lumpsum_path = MuPathKind::Adjusted;
            else
                config_error("lumpsum.path must be \"perceived\" or \"adjusted\"");
        }
    }
    if (const toml::table* t = detail::opt_table(root, "existence")) {
        detail::check_keys(*t, {"e_i", "e_j"}, "[existence]");
        cfg.existence_e_i = detail::opt_number(*t, "e_i", "[existence]");
        cfg.existence_e_j = detail::opt_number(*t, "e_j", "[existence]");
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        detail::config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(TaxPair tp) { return Json{{"t1", tp.t1}, {"t2", tp.t2}}; }

inline Json to_json(const Economy& econ) {
    Json goods = Json::array();
    for (int i = 1; i <= 2; ++i)
        goods.push_back(Json{{"e", econ.good(i).e()}, {"theta", econ.good(i).theta()}});
    return Json{{"mode", std::string(to_string(econ.mode()))}, {"goods", goods}};
}

inline Json to_json(const Solution& s) {
    return Json{
        {"t1", s.taxes.t1},
        {"t2", s.taxes.t2},
        {"mu", s.mu},
        {"perceived_rev", s.perceived_rev},
        {"true_rev", s.true_rev},
        {"welfare", s.welfare},
        {"case", s.case_label ? Json(std::string(to_string(*s.case_label))) : Json(nullptr)},
        {"branch", std::string(to_string(s.branch))},
        {"flags", Json{{"inverse_ramsey", s.flags.inverse_ramsey}, {"subsidy_on_good1", s.flags.subsidy_on_good1}}},
    };
}

inline Json to_json(const InverseRamseyReport& r) {
    return Json{{"holds", r.holds},     {"lhs", r.lhs}, {"rhs", r.rhs}, {"mu", r.mu}, {"burden_share", r.burden_share},
                {"tax_ratio_check", r.tax_ratio_check}};
}

inline Json to_json(const AdjustedSolution& a) {
    return Json{{"adjusted_target", a.adjusted_target},
                {"true_target", a.true_target},
                {"alternatives", a.alternatives},
                {"solution", to_json(a.inner)}};
}

inline Json to_json(const LumpSumReport& r) {
    return Json{{"integral", r.integral},
                {"target", r.target},
                {"commodity_preferred", r.commodity_preferred},
                {"aperitivo_monotone", r.aperitivo_monotone},
                {"complete", r.complete},
                {"integrated_to", r.integrated_to}};
}

inline Json error_json(const Error& e) {
    Json j{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e))
        j["max_revenue"] = inf->max_revenue();
    if (const auto* c = dynamic_cast<const CornerSolutionError*>(&e)) {
        j["best"] = to_json(c->best());
        j["welfare"] = c->welfare();
        j["interior"] = c->interior() ? to_json(*c->interior()) : Json(nullptr);
    }
    return j;
}

inline int exit_code(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::Infeasible:
    case ErrorKind::NoSolution:
    case ErrorKind::EmptyLocus:
    case ErrorKind::NotFound:
    case ErrorKind::NoFeasiblePoint:
    case ErrorKind::CornerSolution: return 2;
    case ErrorKind::BoundaryCase:
    case ErrorKind::DegenerateMultiplier:
    case ErrorKind::Unsupported: return 3;
    case ErrorKind::Config:
    case ErrorKind::Domain: return 4;
    }
    return 1;
}

namespace detail {

inline std::string csv_cell(const Json& v) {
    if (v.is_number_float())
        return format_number(v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

/// key,value rows for a nested report, with dotted keys.
inline void flatten(const Json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out += prefix + "," + csv_cell(j) + "\n";
    }
}

} // namespace detail

inline std::string report_text(const Json& j, bool csv) {
    if (!csv)
        return j.dump(2) + "\n";
    std::string out = "key,value\n";
    detail::flatten(j, "", out);
    return out;
}

inline std::string curves_csv(const std::vector<CurveTrace>& curves, const std::vector<std::string>& labels) {
    std::string out = "kind,t1,t2\n";
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (const auto& p : curves[c].points)
            out += labels[c] + "," + format_number(p.t1) + "," + format_number(p.t2) + "\n";
    return out;
}

inline Json curves_json(const std::vector<CurveTrace>& curves, const std::vector<std::string>& labels) {
    Json arr = Json::array();
    for (std::size_t c = 0; c < curves.size(); ++c) {
        Json pts = Json::array();
        for (const auto& p : curves[c].points)
            pts.push_back(Json::array({p.t1, p.t2}));
        Json stops = Json::array();
        for (auto s : curves[c].stops)
            stops.push_back(std::string(to_string(s)));
        arr.push_back(Json{{"kind", labels[c]},
                           {"segment_starts", curves[c].segment_starts},
                           {"stops", stops},
                           {"points", pts}});
    }
    return Json{{"curves", arr}};
}

// ---------------------------------------------------------------------------
// Commands

enum class Format { Csv, Json };
enum class Mode { Perceived, Adjusted };

struct Options {
    Format format = Format::Json;
    Mode mode = Mode::Perceived;
    std::uint64_t seed = 20240611;
    int samples = 1000;
};

inline Json cmd_solve(const RunConfig& cfg, const Options& opt) {
    const Economy& econ = cfg.economy;
    Json j{{"command", "solve"}, {"economy", to_json(econ)}, {"revenue", cfg.revenue}};
    if (opt.mode == Mode::Adjusted) {
        const auto a = adjust_budget(econ, RevenueTarget(cfg.revenue));
        j["mode"] = "adjusted";
        j["adjusted"] = to_json(a);
        return j;
    }
    const Solution s = solve_perceived(econ, RevenueTarget(cfg.revenue));
    j["mode"] = "perceived";
    j["solution"] = to_json(s);
    try {
        j["inverse_ramsey"] = to_json(inverse_ramsey_check(s, econ));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateMultiplier)
            throw;
        j["inverse_ramsey"] = nullptr;
    }
    return j;
}

inline Json cmd_adjust(const RunConfig& cfg) {
    const auto a = adjust_budget(cfg.economy, RevenueTarget(cfg.revenue));
    Json j{{"command", "adjust"}, {"economy", to_json(cfg.economy)}, {"revenue", cfg.revenue}};
    j.update(to_json(a));
    return j;
}

inline Json cmd_classify(const RunConfig& cfg) {
    const Economy& econ = cfg.economy;
    const CaseLabel c = classify_case(econ);
    return Json{{"command", "classify"},
                {"economy", to_json(econ)},
                {"case", std::string(to_string(c))},
                {"initial_slope", initial_slope(econ)},
                {"vertical_tangent_t2", optional_json(vertical_tangent_t2(econ))},
                {"perceived_laffer_t2", optional_json(perceived_laffer_t2(econ))}};
}

struct TraceOutput {
    std::vector<CurveTrace> curves;
    std::vector<std::string> labels;
    std::vector<std::string> warnings;
};

inline TraceOutput cmd_trace(const RunConfig& cfg) {
    const Economy& econ = cfg.economy;
    const RevenueTarget R(cfg.revenue);
    TraceOutput out;
    auto add = [&](CurveTrace c, std::string label) {
        out.curves.push_back(std::move(c));
        out.labels.push_back(std::move(label));
    };
    add(trace_foc_curve(econ, cfg.trace_box, CurveKind::PerceivedFOC), "perceived_foc");
    add(trace_foc_curve(econ, cfg.trace_box, CurveKind::TrueFOC), "true_foc");
    add(trace_budget_curve(econ, R, CurveKind::PerceivedBudget, cfg.trace_box), "perceived_budget");
    add(trace_budget_curve(econ, R, CurveKind::TrueBudget, cfg.trace_box), "true_budget");
    try {
        const auto a = adjust_budget(econ, R);
        add(trace_budget_curve(econ, RevenueTarget(a.adjusted_target), CurveKind::PerceivedBudget, cfg.trace_box),
            "adjusted_perceived_budget");
    } catch (const Error& e) {
        if (exit_code(e.kind()) != 2)
            throw;
        out.warnings.push_back(std::string("adjusted_perceived_budget omitted: ") + e.what());
    }
    return out;
}

inline int thread_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RI_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct SweepCell {
    double theta2 = 0.0;
    double e2 = 0.0;
    std::string case_label;
    double initial_slope = 0.0;
    std::optional<double> laffer;
    std::string status;
    std::optional<TaxPair> taxes;
    std::optional<double> mu;
    std::optional<bool> inverse_ramsey;
};

inline SweepCell sweep_cell(const Economy& base, double theta2, double e2, double R, Mode mode) {
    SweepCell c;
    c.theta2 = theta2;
    c.e2 = e2;
    const Economy econ(base.good1(), GoodSpec(e2, theta2), base.mode());
    try {
        c.case_label = std::string(to_string(classify_case(econ)));
    } catch (const Error& e) {
        c.case_label = std::string(to_string(e.kind()));
    }
    c.initial_slope = initial_slope(econ);
    c.laffer = perceived_laffer_t2(econ);
    try {
        const Solution s = mode == Mode::Adjusted ? adjust_budget(econ, RevenueTarget(R)).inner
                                                  : solve_perceived(econ, RevenueTarget(R));
        c.status = "ok";
        c.taxes = s.taxes;
        c.mu = s.mu;
        c.inverse_ramsey = s.flags.inverse_ramsey;
    } catch (const Error& e) {
        c.status = std::string(to_string(e.kind()));
    }
    return c;
}

inline std::vector<SweepCell> cmd_sweep(const RunConfig& cfg, Mode mode) {
    const auto& sw = cfg.sweep;
    const std::size_t n = static_cast<std::size_t>(sw.theta2.steps) * static_cast<std::size_t>(sw.e2.steps);
    std::vector<SweepCell> cells(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nt = thread_count(n);
    for (int w = 0; w < nt; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                const int i = static_cast<int>(k / sw.e2.steps), j = static_cast<int>(k % sw.e2.steps);
                cells[k] = sweep_cell(cfg.economy, sw.theta2.at(i), sw.e2.at(j), cfg.revenue, mode);
            }
        });
    for (auto& t : pool)
        t.join();
    return cells;
}

inline std::string sweep_csv(const std::vector<SweepCell>& cells) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    std::string out = "theta2,e2,case,initial_slope,perceived_laffer_t2,status,t1,t2,mu,inverse_ramsey\n";
    for (const auto& c : cells) {
        out += format_number(c.theta2) + "," + format_number(c.e2) + "," + c.case_label + "," +
               format_number(c.initial_slope) + "," + opt(c.laffer) + "," + c.status + ",";
        out += (c.taxes ? format_number(c.taxes->t1) : "") + "," + (c.taxes ? format_number(c.taxes->t2) : "") + ",";
        out += opt(c.mu) + "," + (c.inverse_ramsey ? (*c.inverse_ramsey ? "true" : "false") : "") + "\n";
    }
    return out;
}

inline Json sweep_json(const std::vector<SweepCell>& cells) {
    Json arr = Json::array();
    for (const auto& c : cells)
        arr.push_back(Json{{"theta2", c.theta2},
                           {"e2", c.e2},
                           {"case", c.case_label},
                           {"initial_slope", c.initial_slope},
                           {"perceived_laffer_t2", optional_json(c.laffer)},
                           {"status", c.status},
                           {"t1", c.taxes ? Json(c.taxes->t1) : Json(nullptr)},
                           {"t2", c.taxes ? Json(c.taxes->t2) : Json(nullptr)},
                           {"mu", optional_json(c.mu)},
                           {"inverse_ramsey", c.inverse_ramsey ? Json(*c.inverse_ramsey) : Json(nullptr)}});
    return Json{{"command", "sweep"}, {"cells", arr}};
}

inline Json cmd_lumpsum(const RunConfig& cfg, const Options& opt) {
    MuPathKind path = cfg.lumpsum_path;
    if (opt.mode == Mode::Adjusted)
        path = MuPathKind::Adjusted;
    const auto rep = lumpsum_compare(cfg.economy, RevenueTarget(cfg.revenue), LumpSumOptions{path, 1e-7});
    Json j{{"command", "lumpsum"},
           {"economy", to_json(cfg.economy)},
           {"path", path == MuPathKind::Perceived ? "perceived" : "adjusted"}};
    j.update(to_json(rep));
    return j;
}

inline Json cmd_existence(const RunConfig& cfg) {
    const Economy& econ = cfg.economy;
    const double hi = std::max(econ.good1().e(), econ.good2().e());
    const double lo = std::min(econ.good1().e(), econ.good2().e());
    const double ei = cfg.existence_e_i.value_or(hi);
    const double ej = cfg.existence_e_j.value_or(lo);
    const double th = existence_threshold(ei, ej, RevenueTarget(cfg.revenue));
    return Json{{"command", "existence"}, {"e_i", ei},       {"e_j", ej},
                {"revenue", cfg.revenue}, {"theta_bar", th}, {"lower_bound", ej / ei}};
}

inline Json cmd_verify(const Options& opt, bool& all_passed) {
    Json arr = Json::array();
    all_passed = true;
    for (const auto& r : run_property_suite(opt.seed, opt.samples)) {
        all_passed = all_passed && r.passed();
        arr.push_back(Json{{"name", r.name},
                           {"samples", r.samples},
                           {"failures", r.failures},
                           {"worst", r.worst},
                           {"tolerance", r.tolerance},
                           {"passed", r.passed()}});
    }
    return Json{{"command", "verify"}, {"seed", opt.seed}, {"properties", arr}};
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tax design under misperceived elasticities"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "json", mode = "perceived";
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "TOML economy configuration");
        if (needs_config)
            c->required();
        sub->add_option("--out", out_path, "Write output to this file instead of stdout");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--mode", mode, "Solve the perceived problem or apply the budget adjustment")
            ->check(CLI::IsMember({"perceived", "adjusted"}));
        sub->add_option("--seed", opt.seed, "Seed for randomized checks");
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "Solve the perceived problem"},
        {"adjust", "Apply the budget adjustment rule"},
        {"trace", "Trace FOC and budget loci as CSV"},
        {"classify", "Case label and closed-form diagnostics"},
        {"sweep", "Grid over theta2 and e2"},
        {"lumpsum", "Integrated multiplier against a lump sum"},
        {"existence", "Threshold misperception for an inverse-Ramsey outcome"},
        {"verify", "Randomized model identities"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, name != "verify");
        if (name == "verify")
            sub->add_option("--samples", opt.samples, "Samples per property")->check(CLI::PositiveNumber);
    }

    std::vector<const char*> argv{"ritax"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << Json{{"error", "Config"}, {"message", e.what()}}.dump() << "\n";
        return 4;
    }
    opt.format = format == "csv" ? Format::Csv : Format::Json;
    opt.mode = mode == "adjusted" ? Mode::Adjusted : Mode::Perceived;
    const std::string command = app.get_subcommands().front()->get_name();
    const bool csv = opt.format == Format::Csv;

    std::string text;
    int status = 0;
    try {
        if (command == "verify") {
            bool ok = true;
            text = report_text(cmd_verify(opt, ok), csv);
            status = ok ? 0 : 1;
        } else {
            const RunConfig cfg = load_config(config_path);
            if (command == "solve") {
                text = report_text(cmd_solve(cfg, opt), csv);
            } else if (command == "adjust") {
                text = report_text(cmd_adjust(cfg), csv);
            } else if (command == "classify") {
                text = report_text(cmd_classify(cfg), csv);
            } else if (command == "trace") {
                const auto tr = cmd_trace(cfg);
                for (const auto& w : tr.warnings)
                    err << Json{{"warning", w}}.dump() << "\n";
                text = csv ? curves_csv(tr.curves, tr.labels) : curves_json(tr.curves, tr.labels).dump() + "\n";
            } else if (command == "sweep") {
                const auto cells = cmd_sweep(cfg, opt.mode);
                text = csv ? sweep_csv(cells) : sweep_json(cells).dump(2) + "\n";
            } else if (command == "lumpsum") {
                text = report_text(cmd_lumpsum(cfg, opt), csv);
            } else if (command == "existence") {
                text = report_text(cmd_existence(cfg), csv);
            }
        }
    } catch (const Error& e) {
        err << error_json(e).dump() << "\n";
        return exit_code(e.kind());
    }

    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << Json{{"error", "Config"}, {"message", "cannot write '" + out_path + "'"}}.dump() << "\n";
            return 4;
        }
        f << text;
    }
    return status;
}

} // namespace ritax::cli
