#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bounds.hpp"
#include "dynamics.hpp"
#include "graph.hpp"
#include "quantization.hpp"
#include "randwalk.hpp"
#include "rng.hpp"

namespace qgossip {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- presets

/// One node at 0, one at 2 units, the rest at 1 unit.
inline std::vector<Units> preset_psi(int n, int low_node = 0, int high_node = -1) {
    if (n < 3)
        throw ParameterError("preset_psi: n must be >= 3");
    if (high_node < 0)
        high_node = n - 1;
    if (low_node < 0 || low_node >= n || high_node >= n || low_node == high_node)
        throw ParameterError("preset_psi: low and high nodes must be distinct and in range");
    std::vector<Units> u(static_cast<std::size_t>(n), 1);
    u[static_cast<std::size_t>(low_node)] = 0;
    u[static_cast<std::size_t>(high_node)] = 2;
    return u;
}

/// Clique size floor((2n + 1) / 3) of the worst-case lollipop.
inline int lollipop_m0(int n) { return (2 * n + 1) / 3; }

inline Graph preset_lollipop_m0(int n) {
    if (n < 4)
        throw ParameterError("preset_lollipop_m0: n must be >= 4");
    return build_named(GraphKind::lollipop, n, lollipop_m0(n));
}

/// g at ticks that are multiples of b, all nodes isolated otherwise.
inline GraphSchedule preset_scaled_schedule(const Graph &g, int b, std::string desc = "graph") {
    if (b < 1)
        throw ParameterError("preset_scaled_schedule: b must be >= 1");
    if (b == 1)
        return GraphSchedule::constant(g, std::move(desc));
    std::vector<Graph> gs{g};
    for (int k = 1; k < b; ++k)
        gs.push_back(Graph::empty(g.n()));
    return GraphSchedule::periodic(std::move(gs), "scaled(" + desc + ";b=" + std::to_string(b) + ")");
}

// ---------------------------------------------------------------- statistics

struct SummaryStats {
    std::int64_t trials = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se = 0.0;
    std::optional<double> ci_low;  ///< 95% normal CI, only without timeouts
    std::optional<double> ci_high;
    double min = 0.0;
    double max = 0.0;
    std::int64_t timeouts = 0;
    double markov_tail_fraction = 0.0; ///< share of trials with t_con > 2 * mean
};

inline SummaryStats summarize(const std::vector<RunRecord> &records) {
    SummaryStats s;
    s.trials = static_cast<std::int64_t>(records.size());
    if (records.empty())
        return s;
    double sum = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -s.min;
    for (const auto &r : records) {
        const auto t = static_cast<double>(r.t_con);
        sum += t;
        s.min = std::min(s.min, t);
        s.max = std::max(s.max, t);
        s.timeouts += r.timeout;
    }
    const auto n = static_cast<double>(records.size());
    s.mean = sum / n;
    double ss = 0.0;
    std::int64_t tail = 0;
    for (const auto &r : records) {
        const double d = static_cast<double>(r.t_con) - s.mean;
        ss += d * d;
        tail += static_cast<double>(r.t_con) > 2.0 * s.mean;
    }
    s.variance = records.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.se = std::sqrt(s.variance / n);
    if (s.timeouts == 0) {
        s.ci_low = s.mean - 1.959963984540054 * s.se;
        s.ci_high = s.mean + 1.959963984540054 * s.se;
    }
    s.markov_tail_fraction = static_cast<double>(tail) / n;
    return s;
}

// ---------------------------------------------------------------- config

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::af;
    nlohmann::json graph;    ///< {"kind": ..., "n": ..., ...}
    nlohmann::json schedule; ///< {"type": "constant" | "scaled" | "gnp_per_tick", ...}
    int window = 0;          ///< periodic-connectivity window; 0 picks the schedule's natural value
    QuantizerSpec quantizer{0.0, 16.0, 3};
    nlohmann::json initial;  ///< {"kind": "psi" | "uniform" | "explicit", ...}
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    std::int64_t max_ticks = 10'000'000;
    std::vector<std::string> outputs{"tcon", "events", "bounds"};
    int threads = 0;

    bool wants(const std::string &o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }
};

inline ExperimentConfig config_from_json(const nlohmann::json &j) {
    try {
        ExperimentConfig c;
        c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        c.graph = j.at("graph");
        c.schedule = j.value("schedule", nlohmann::json{{"type", "constant"}});
        c.window = j.value("window", 0);
        if (j.contains("quantizer"))
            c.quantizer = quantizer_from_json(j.at("quantizer"));
        c.initial = j.value("initial", nlohmann::json{{"kind", "psi"}});
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.max_ticks = j.value("max_ticks", c.max_ticks);
        if (j.contains("outputs"))
            c.outputs = j.at("outputs").get<std::vector<std::string>>();
        c.threads = j.value("threads", 0);
        if (c.trials < 1)
            throw ConfigError("trials must be >= 1");
        if (c.max_ticks < 1)
            throw ConfigError("max_ticks must be >= 1");
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ParameterError &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

struct BuiltGraph {
    Graph graph;
    std::string desc;
    std::optional<double> gnp_p; ///< set for per-tick G(n,p) specs
};

inline BuiltGraph build_graph(const nlohmann::json &spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "file") {
        const auto path = spec.at("path").get<std::string>();
        return {load_edge_list(path), "file(" + path + ")", std::nullopt};
    }
    if (kind == "edges") {
        const int n = spec.at("n").get<int>();
        std::vector<Edge> e;
        for (const auto &p : spec.at("edges"))
            e.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        return {Graph(n, std::move(e)), "edges(n=" + std::to_string(n) + ")", std::nullopt};
    }
    const int n = spec.at("n").get<int>();
    if (kind == "lollipop_m0")
        return {preset_lollipop_m0(n), describe(GraphKind::lollipop, n, lollipop_m0(n)), std::nullopt};
    if (kind == "gnp") {
        const double p = spec.at("p").get<double>();
        auto s = spec.value("seed", std::uint64_t{1});
        Graph g = sample_gnp(n, p, s);
        if (spec.value("connected", false)) {
            for (int tries = 0; !is_connected(g); ++tries) {
                if (tries > 100000)
                    throw ConfigError("gnp: no connected sample found");
                g = sample_gnp(n, p, ++s);
            }
        }
        std::ostringstream d;
        d << "gnp(n=" << n << ";p=" << p << ";seed=" << s << ")";
        return {std::move(g), d.str(), p};
    }
    const GraphKind gk = parse_graph_kind(kind);
    const int m = spec.value("m", 0);
    return {build_named(gk, n, m), describe(gk, n, m), std::nullopt};
}

struct PreparedExperiment {
    GraphSchedule schedule;
    Graph base;       ///< graph of the first tick (the fixed graph for AF)
    std::optional<double> gnp_p;
    int window = 1;
    QState x0;
    std::vector<std::string> warnings;
};

inline std::vector<Units> random_units(int n, Units levels, std::optional<Units> target_j, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_int_distribution<Units> draw(0, levels);
    for (int tries = 0; tries < 1000000; ++tries) {
        std::vector<Units> u(static_cast<std::size_t>(n));
        for (auto &k : u)
            k = draw(rng);
        auto [lo, hi] = std::minmax_element(u.begin(), u.end());
        if (!target_j || *hi - *lo == *target_j)
            return u;
    }
    throw ConfigError("uniform initial state: no sample with the requested spread");
}

inline PreparedExperiment prepare(const ExperimentConfig &cfg) {
    try {
        BuiltGraph bg = build_graph(cfg.graph);
        const int n = bg.graph.n();
        const std::string type = cfg.schedule.value("type", std::string("constant"));
        std::optional<GraphSchedule> schedule;
        int natural_window = 1;
        if (type == "constant") {
            schedule = GraphSchedule::constant(bg.graph, bg.desc);
        } else if (type == "scaled") {
            natural_window = cfg.schedule.at("b").get<int>();
            schedule = preset_scaled_schedule(bg.graph, natural_window, bg.desc);
        } else if (type == "gnp_per_tick") {
            if (!bg.gnp_p)
                throw ConfigError("gnp_per_tick schedule needs a gnp graph spec");
            schedule = GraphSchedule::gnp(n, *bg.gnp_p, cfg.seed);
        } else {
            throw ConfigError("unknown schedule type '" + type + "'");
        }

        std::vector<Units> units;
        const std::string ik = cfg.initial.value("kind", std::string("psi"));
        if (ik == "psi") {
            units = preset_psi(n, cfg.initial.value("low_node", 0), cfg.initial.value("high_node", n - 1));
        } else if (ik == "uniform") {
            std::optional<Units> tj;
            if (cfg.initial.contains("target_j"))
                tj = cfg.initial.at("target_j").get<Units>();
            units = random_units(n, cfg.quantizer.levels(), tj, mix64(cfg.seed ^ 0x1f1f1f1f2e2e2e2eULL));
        } else if (ik == "explicit") {
            units = cfg.initial.at("units").get<std::vector<Units>>();
        } else {
            throw ConfigError("unknown initial kind '" + ik + "'");
        }
        if (static_cast<int>(units.size()) != n)
            throw ConfigError("initial state has " + std::to_string(units.size()) + " entries, graph has " +
                              std::to_string(n) + " nodes");

        PreparedExperiment pe{*schedule, bg.graph, bg.gnp_p, cfg.window > 0 ? cfg.window : natural_window,
                              QState(cfg.quantizer, std::move(units)), {}};
        if (cfg.algorithm == Algorithm::af) {
            if (type != "constant")
                throw ConfigError("AF runs on a constant schedule");
            if (!is_connected(bg.graph))
                throw ConfigError("AF needs a connected graph");
        }
        if (cfg.algorithm == Algorithm::ar && type != "gnp_per_tick")
            throw ConfigError("AR-analysis runs on a gnp_per_tick schedule");
        if (cfg.algorithm == Algorithm::as && pe.schedule.kind() != GraphSchedule::Kind::generator) {
            const std::int64_t horizon = pe.schedule.period() + pe.window;
            if (!check_periodic_connectivity(pe.schedule, pe.window, horizon))
                pe.warnings.push_back("schedule is not periodically connected with window " +
                                      std::to_string(pe.window));
        }
        return pe;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ParameterError &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const RangeError &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// ---------------------------------------------------------------- execution

struct BoundCheck {
    std::string name;
    double measured = 0.0; ///< quantity compared against the bound
    double bound = 0.0;
    bool ok = true;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    SummaryStats summary;
    std::vector<BoundReport> bounds;
    std::vector<BoundCheck> checks;
    std::vector<std::string> warnings;

    bool bound_violated() const {
        return std::any_of(checks.begin(), checks.end(), [](const BoundCheck &c) { return !c.ok; });
    }
};

/// Runs every trial into `out`, slot k holding trial k regardless of thread scheduling.
inline void run_trials(const ExperimentConfig &cfg, const PreparedExperiment &pe, std::vector<RunRecord> &out,
                       int threads) {
    out.assign(static_cast<std::size_t>(cfg.trials), RunRecord{});
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t k = next++; k < cfg.trials; k = next++) {
            const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
            const GraphSchedule sched = pe.schedule.reseeded(mix64(s ^ 0x5bd1e995ULL));
            out[static_cast<std::size_t>(k)] = run(cfg.algorithm, sched, pe.x0, s, cfg.max_ticks);
        }
    };
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto &th : pool)
        th.join();
}

inline ExperimentResult run_experiment(const ExperimentConfig &cfg) {
    PreparedExperiment pe = prepare(cfg);
    ExperimentResult res;
    res.warnings = pe.warnings;
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    run_trials(cfg, pe, res.records, std::max(1, threads));
    res.summary = summarize(res.records);

    const int n = pe.x0.size();
    const Units j0 = spread_j(pe.x0);
    const double upper_mean = res.summary.mean - 3.0 * res.summary.se;
    if (cfg.wants("bounds") && j0 >= 1) {
        BoundReport r;
        switch (cfg.algorithm) {
        case Algorithm::af: r = report_thm2(n, j0); break;
        case Algorithm::as: r = report_thm6(n, pe.window, j0); break;
        case Algorithm::ar: r = report_ar_exact(n, *pe.gnp_p, j0); break;
        }
        res.checks.push_back({r.name, upper_mean, r.value, upper_mean <= r.value});
        res.bounds.push_back(std::move(r));
        if (cfg.algorithm == Algorithm::as) {
            res.bounds.push_back(report_t1(n, pe.window));
            res.bounds.push_back(report_prop2(n, pe.window));
        }
        if (cfg.algorithm == Algorithm::ar)
            res.bounds.push_back(report_ar_relaxed(n, *pe.gnp_p, j0));
    }
    if (cfg.wants("walks")) {
        switch (cfg.algorithm) {
        case Algorithm::af: {
            const Matrix hsf = hitting_time_matrix(p_sf(pe.base));
            const double hmax = hsf.maxCoeff();
            const MeetingTimes mt = meeting_time_exact(p_af(pe.base));
            BoundReport r = report_prop1(n, hmax);
            res.checks.push_back({"meeting_af_vs_prop1", mt.worst, r.value, mt.worst <= r.value + 1e-6});
            res.bounds.push_back(std::move(r));
            break;
        }
        case Algorithm::as: {
            if (pe.schedule.kind() == GraphSchedule::Kind::generator)
                break;
            const MeetingTimes mt = meeting_time_exact(MatrixSchedule::from_graphs(pe.schedule, p_as));
            const double b = bound_prop2(n, pe.window);
            res.checks.push_back({"meeting_as_vs_prop2", mt.worst, b, mt.worst <= b});
            break;
        }
        case Algorithm::ar: {
            const double m = 1.0 / (2.0 * p0(n, *pe.gnp_p));
            res.bounds.push_back({"ar_meeting_time", {{"N", n}, {"p", *pe.gnp_p}}, m, "G(N,p) meeting time: 1/(2 p0)"});
            break;
        }
        }
    }
    return res;
}

// ---------------------------------------------------------------- emission

/// Fixed 12-significant-digit rendering.
inline std::string fmt12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

inline const char *kCsvHeader = "algorithm,n,graph_desc,seed,t_con,timeout,nontrivial,trivial,noop,j0,v0";

inline void emit_csv(std::ostream &os, const std::vector<RunRecord> &records) {
    for (const auto &r : records)
        check_record(r);
    os << kCsvHeader << '\n';
    for (const auto &r : records) {
        os << to_string(r.algorithm) << ',' << r.n << ',' << r.graph_desc << ',' << r.seed << ',' << r.t_con << ','
           << (r.timeout ? 1 : 0) << ',' << r.nontrivial << ',' << r.trivial << ',' << r.noop << ',' << r.j0 << ','
           << fmt12(to_double(r.v0)) << '\n';
    }
}

inline ojson record_to_json(const RunRecord &r) {
    ojson o;
    o["algorithm"] = to_string(r.algorithm);
    o["n"] = r.n;
    o["graph_desc"] = r.graph_desc;
    o["seed"] = r.seed;
    o["t_con"] = r.t_con;
    o["timeout"] = r.timeout;
    o["nontrivial"] = r.nontrivial;
    o["trivial"] = r.trivial;
    o["noop"] = r.noop;
    o["j0"] = r.j0;
    o["v0"] = round12(to_double(r.v0));
    return o;
}

inline RunRecord record_from_json(const nlohmann::json &o) {
    RunRecord r;
    r.algorithm = parse_algorithm(o.at("algorithm").get<std::string>());
    r.n = o.at("n").get<int>();
    r.graph_desc = o.at("graph_desc").get<std::string>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.t_con = o.at("t_con").get<std::int64_t>();
    r.timeout = o.at("timeout").get<bool>();
    r.nontrivial = o.at("nontrivial").get<std::int64_t>();
    r.trivial = o.at("trivial").get<std::int64_t>();
    r.noop = o.at("noop").get<std::int64_t>();
    r.j0 = o.at("j0").get<Units>();
    // n * V_mean is an integer, so the 12-digit value pins the rational exactly for small n.
    r.v0 = Rational(std::llround(o.at("v0").get<double>() * r.n), r.n);
    return r;
}

inline ojson summary_to_json(const SummaryStats &s) {
    ojson o;
    o["trials"] = s.trials;
    o["mean"] = round12(s.mean);
    o["variance"] = round12(s.variance);
    o["se"] = round12(s.se);
    if (s.ci_low) {
        o["ci95"] = {round12(*s.ci_low), round12(*s.ci_high)};
    } else {
        o["ci95"] = nullptr;
        o["ci95_flag"] = "timeouts present";
    }
    o["min"] = round12(s.min);
    o["max"] = round12(s.max);
    o["timeouts"] = s.timeouts;
    o["markov_tail_fraction"] = round12(s.markov_tail_fraction);
    return o;
}

inline ojson bound_to_json(const BoundReport &b) {
    ojson o;
    o["name"] = b.name;
    ojson in = ojson::object();
    for (const auto &[k, v] : b.inputs)
        in[k] = round12(v);
    o["inputs"] = in;
    o["value"] = round12(b.value);
    o["source"] = b.source;
    return o;
}

inline ojson result_to_json(const ExperimentResult &res) {
    for (const auto &r : res.records)
        check_record(r);
    ojson o;
    o["records"] = ojson::array();
    for (const auto &r : res.records)
        o["records"].push_back(record_to_json(r));
    o["summary"] = summary_to_json(res.summary);
    o["bounds"] = ojson::array();
    for (const auto &b : res.bounds)
        o["bounds"].push_back(bound_to_json(b));
    o["checks"] = ojson::array();
    for (const auto &c : res.checks)
        o["checks"].push_back(ojson{{"name", c.name}, {"measured", round12(c.measured)}, {"bound", round12(c.bound)},
                                    {"ok", c.ok}});
    o["warnings"] = res.warnings;
    return o;
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string &s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + s + "'");
}

inline void emit(std::ostream &os, const ExperimentResult &res, OutputFormat fmt) {
    if (fmt == OutputFormat::csv)
        emit_csv(os, res.records);
    else
        os << result_to_json(res).dump(2) << '\n';
}

inline void emit(const std::string &path, const ExperimentResult &res, OutputFormat fmt) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    emit(out, res, fmt);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------- reports

struct GrowthRow {
    int n = 0;
    int m0 = 0;
    double h_sf_max = 0.0;
    double meeting_af = 0.0;       ///< two-token AF walk, far clique node to path end
    double psi_expected = 0.0;     ///< exact E[T_con] of AF from the Psi state on the same pair
};

/// Exact lollipop quantities over a range of n, for eyeballing growth rates.
inline std::vector<GrowthRow> lollipop_growth(int n_lo, int n_hi) {
    std::vector<GrowthRow> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        const Graph g = preset_lollipop_m0(n);
        GrowthRow r;
        r.n = n;
        r.m0 = lollipop_m0(n);
        r.h_sf_max = hitting_time_matrix(p_sf(g)).maxCoeff();
        const TransitionMatrix paf = p_af(g);
        r.meeting_af = meeting_time_exact(paf, PairMoves::exclusive).at(0, n - 1);
        r.psi_expected = meeting_time_exact(paf, PairMoves::exchange).at(0, n - 1);
        rows.push_back(r);
    }
    return rows;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace qgossip
