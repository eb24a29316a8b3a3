// qgossip: command-line front end for the quantized gossip toolkit.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <qgossip/qgossip.hpp>

namespace {

using namespace qgossip;

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBoundViolation = 3;

std::string default_out_path(const std::string &config_path, OutputFormat fmt) {
    const char *dir = std::getenv("QGOSSIP_OUT_DIR");
    if (!dir || !*dir)
        return {};
    const auto stem = std::filesystem::path(config_path).stem().string();
    return (std::filesystem::path(dir) / (stem + (fmt == OutputFormat::csv ? ".csv" : ".json"))).string();
}

int cmd_run(const std::string &config_path, std::optional<std::uint64_t> seed, std::optional<std::int64_t> trials,
            std::optional<std::int64_t> max_ticks, std::optional<int> threads, std::string out,
            const std::string &format) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (max_ticks) cfg.max_ticks = *max_ticks;
    if (threads) cfg.threads = *threads;
    const OutputFormat fmt = parse_format(format);
    ExperimentResult res = run_experiment(cfg);
    for (const auto &w : res.warnings)
        std::cerr << "warning: " << w << '\n';
    if (out.empty())
        out = default_out_path(config_path, fmt);
    if (out.empty())
        emit(std::cout, res, fmt);
    else
        emit(out, res, fmt);
    std::cerr << "trials=" << res.summary.trials << " mean_t_con=" << fmt12(res.summary.mean)
              << " se=" << fmt12(res.summary.se) << " timeouts=" << res.summary.timeouts << '\n';
    for (const auto &c : res.checks)
        if (!c.ok)
            std::cerr << "BOUND VIOLATION: " << c.name << " measured " << fmt12(c.measured) << " > bound "
                      << fmt12(c.bound) << '\n';
    return res.bound_violated() ? kExitBoundViolation : 0;
}

TransitionMatrix walk_matrix(const Graph &g, const std::string &walk) {
    if (walk == "af") return p_af(g);
    if (walk == "as") return p_as(g);
    if (walk == "sf") return p_sf(g);
    throw ParameterError("unknown walk '" + walk + "' (af|as|sf)");
}

int cmd_walks(const std::string &graph_path, bool mc, const std::string &walk, const std::string &moves,
              std::optional<std::pair<int, int>> pair, std::int64_t trials, std::uint64_t seed,
              const std::string &matrix_csv) {
    const Graph g = load_edge_list(graph_path);
    const int n = g.n();
    const TransitionMatrix pm = walk_matrix(g, walk);
    if (!matrix_csv.empty()) {
        std::ofstream os(matrix_csv);
        if (!os)
            throw std::runtime_error("cannot write '" + matrix_csv + "'");
        write_matrix_csv(os, pm.p());
    }
    ojson out;
    out["n"] = n;
    out["walk"] = walk;
    if (mc) {
        if (walk == "sf")
            throw ParameterError("Monte Carlo tokens use the af or as rule");
        const auto [a, b] = pair.value_or(std::make_pair(0, n - 1));
        const auto est = meeting_time_mc(GraphSchedule::constant(g), a, b,
                                         walk == "as" ? TokenRule::as : TokenRule::af, trials, seed);
        out["meeting"] = ojson::array({walk_result_json(a, b, est.mean, "mc", est.se)});
        out["capped_trials"] = est.capped;
    } else {
        const PairMoves pmv = parse_pair_moves(moves);
        const MeetingTimes mt = meeting_time_exact(pm, pmv);
        out["pair_moves"] = to_string(pmv);
        out["meeting"] = ojson::array();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!pair || (pair->first == i && pair->second == j) || (pair->first == j && pair->second == i))
                    out["meeting"].push_back(walk_result_json(i, j, mt.at(i, j), "exact"));
        out["meeting_max"] = mt.worst;
        const Matrix h = hitting_time_matrix(pm);
        out["hitting"] = ojson::array();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    out["hitting"].push_back(walk_result_json(i, j, h(i, j), "exact"));
        if (is_connected(g)) {
            const double hsf = hitting_time_matrix(p_sf(g)).maxCoeff();
            out["h_sf_max"] = hsf;
            out["prop1_bound"] = bound_prop1(n, hsf);
        }
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_bounds(int n, int b, std::int64_t j, std::optional<double> p, std::optional<double> hsf) {
    ojson out = ojson::array();
    out.push_back(bound_to_json(report_thm2(n, j)));
    out.push_back(bound_to_json({"hsf_cubic", {{"N", n}}, bound_hsf_cubic(n), "simple-walk hitting time <= 4N^3/27"}));
    out.push_back(bound_to_json(report_t1(n, b)));
    out.push_back(bound_to_json(report_prop2(n, b)));
    out.push_back(bound_to_json(report_thm6(n, b, j)));
    if (hsf)
        out.push_back(bound_to_json(report_prop1(n, *hsf)));
    if (p) {
        const ArBound ar = bound_ar(n, *p, j);
        out.push_back(bound_to_json(report_ar_exact(n, *p, j)));
        ojson rel = bound_to_json(report_ar_relaxed(n, *p, j));
        rel["relaxation_holds"] = ar.relaxation_holds;
        out.push_back(rel);
        out.push_back(bound_to_json({"p0", {{"N", n}, {"p", *p}}, p0(n, *p), "per-tick directed-edge selection probability"}));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_graph(const std::string &kind, int n, int m, double p, std::uint64_t seed) {
    Graph g;
    if (kind == "gnp")
        g = sample_gnp(n, p, seed);
    else if (kind == "lollipop_m0")
        g = preset_lollipop_m0(n);
    else
        g = build_named(parse_graph_kind(kind), n, m);
    write_edge_list(std::cout, g);
    return 0;
}

int cmd_growth(int lo, int hi) {
    const auto rows = lollipop_growth(lo, hi);
    std::vector<double> ns, hs, ms, ps;
    std::cout << "n,m0,h_sf_max,meeting_af,psi_expected\n";
    for (const auto &r : rows) {
        std::cout << r.n << ',' << r.m0 << ',' << fmt12(r.h_sf_max) << ',' << fmt12(r.meeting_af) << ','
                  << fmt12(r.psi_expected) << '\n';
        ns.push_back(r.n);
        hs.push_back(r.h_sf_max);
        ms.push_back(r.meeting_af);
        ps.push_back(r.psi_expected);
    }
    if (rows.size() >= 2)
        std::cerr << "log-log slopes: h_sf " << fmt12(loglog_slope(ns, hs)) << ", meeting_af "
                  << fmt12(loglog_slope(ns, ms)) << ", psi " << fmt12(loglog_slope(ns, ps)) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantized asynchronous gossip: simulation, random-walk analysis, and bounds"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Run a Monte-Carlo experiment from a JSON config");
    std::string config_path, out, format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials, max_ticks;
    std::optional<int> threads;
    run->add_option("config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "master seed");
    run->add_option("--trials", trials, "number of trials");
    run->add_option("--max-ticks", max_ticks, "per-trial tick cap");
    run->add_option("--threads", threads, "worker threads");
    run->add_option("--out", out, "output path (default: stdout, or $QGOSSIP_OUT_DIR/<config>.<fmt>)");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto *walks = app.add_subcommand("walks", "Hitting and meeting times on a graph file");
    std::string graph_path, walk = "af", moves = "exclusive", matrix_csv;
    bool exact = false, mc = false;
    std::vector<int> pair_arg;
    std::int64_t walk_trials = 10000;
    std::uint64_t walk_seed = 1;
    walks->add_option("graph", graph_path, "edge-list file")->required()->check(CLI::ExistingFile);
    auto *exact_flag = walks->add_flag("--exact", exact, "exact linear-algebra solve (default)");
    walks->add_flag("--mc", mc, "Monte-Carlo two-token estimate")->excludes(exact_flag);
    walks->add_option("--walk", walk, "af, as or sf")->check(CLI::IsMember({"af", "as", "sf"}));
    walks->add_option("--moves", moves, "pair model: exclusive, independent or exchange");
    walks->add_option("--pair", pair_arg, "start pair a b")->expected(2);
    walks->add_option("--trials", walk_trials, "Monte-Carlo trials");
    walks->add_option("--seed", walk_seed, "Monte-Carlo seed");
    walks->add_option("--matrix-csv", matrix_csv, "also write the walk matrix as CSV");

    auto *bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
    int bn = 0, bb = 1;
    std::int64_t bj = 1;
    std::optional<double> bp, bh;
    bounds->add_option("--n", bn, "node count")->required();
    bounds->add_option("--b", bb, "connectivity window");
    bounds->add_option("--j", bj, "initial spread J in units");
    bounds->add_option("--p", bp, "G(n,p) edge probability");
    bounds->add_option("--h-sf", bh, "simple-walk hitting time, for the meeting-time bound");

    auto *graph = app.add_subcommand("graph", "Print a graph as an edge list");
    std::string kind;
    int gn = 0, gm = 0;
    double gp = 0.5;
    std::uint64_t gseed = 1;
    graph->add_option("kind", kind, "path, cycle, star, complete, lollipop, lollipop_m0 or gnp")->required();
    graph->add_option("--n", gn, "node count")->required();
    graph->add_option("--m", gm, "clique size (lollipop)");
    graph->add_option("--p", gp, "edge probability (gnp)");
    graph->add_option("--seed", gseed, "seed (gnp)");

    auto *growth = app.add_subcommand("growth", "Exact lollipop quantities over a range of n");
    int glo = 4, ghi = 12;
    growth->add_option("--from", glo, "smallest n");
    growth->add_option("--to", ghi, "largest n");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config_path, seed, trials, max_ticks, threads, out, format);
        if (*walks) {
            std::optional<std::pair<int, int>> pr;
            if (pair_arg.size() == 2)
                pr = std::make_pair(pair_arg[0], pair_arg[1]);
            return cmd_walks(graph_path, mc, walk, moves, pr, walk_trials, walk_seed, matrix_csv);
        }
        if (*bounds)
            return cmd_bounds(bn, bb, bj, bp, bh);
        if (*graph)
            return cmd_graph(kind, gn, gm, gp, gseed);
        if (*growth)
            return cmd_growth(glo, ghi);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError &e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
