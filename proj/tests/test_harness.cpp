#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <qgossip/harness.hpp>

using namespace qgossip;

namespace {

ExperimentConfig psi_config(const std::string &graph_json, int trials, std::uint64_t seed) {
    auto j = nlohmann::json::parse(R"({"algorithm": "AF", "initial": {"kind": "psi"}, "threads": 2})");
    j["graph"] = nlohmann::json::parse(graph_json);
    j["trials"] = trials;
    j["seed"] = seed;
    return config_from_json(j);
}

std::string csv_of(const ExperimentResult &r) {
    std::ostringstream os;
    emit(os, r, OutputFormat::csv);
    return os.str();
}

} // namespace

TEST(Presets, Psi) {
    EXPECT_EQ(preset_psi(4), (std::vector<Units>{0, 1, 1, 2}));
    EXPECT_EQ(preset_psi(5, 2, 0), (std::vector<Units>{2, 1, 0, 1, 1}));
    EXPECT_THROW(preset_psi(2), ParameterError);
    EXPECT_THROW(preset_psi(4, 1, 1), ParameterError);
}

TEST(Presets, Lollipop) {
    EXPECT_EQ(lollipop_m0(7), 5);
    EXPECT_EQ(lollipop_m0(10), 7);
    EXPECT_EQ(preset_lollipop_m0(7), build_named(GraphKind::lollipop, 7, 5));
    EXPECT_THROW(preset_lollipop_m0(3), ParameterError);
}

TEST(Presets, ScaledSchedule) {
    const Graph p3 = build_named(GraphKind::path, 3);
    const auto one = preset_scaled_schedule(p3, 1);
    EXPECT_EQ(one.kind(), GraphSchedule::Kind::constant);
    const auto two = preset_scaled_schedule(p3, 2);
    EXPECT_EQ(two.period(), 2);
    EXPECT_EQ(two.graph_at(4), p3);
    EXPECT_EQ(two.graph_at(5).edge_count(), 0u);
    EXPECT_TRUE(check_periodic_connectivity(two, 2, 10));
    EXPECT_FALSE(check_periodic_connectivity(two, 1, 10));
    EXPECT_THROW(preset_scaled_schedule(p3, 0), ParameterError);
}

TEST(Presets, ScaledScheduleStretchesTime) {
    const Graph g = build_named(GraphKind::lollipop, 5, 3);
    const QState x(QuantizerSpec(0, 1, 3), preset_psi(5));
    const auto fixed = GraphSchedule::constant(g);
    const auto scaled = preset_scaled_schedule(g, 2);
    const int trials = 4000;
    std::vector<RunRecord> a, b;
    for (int k = 0; k < trials; ++k) {
        a.push_back(run(Algorithm::as, fixed, x, derive_seed(1, k), 10'000'000));
        b.push_back(run(Algorithm::as, scaled, x, derive_seed(2, k), 10'000'000));
    }
    const SummaryStats sa = summarize(a), sb = summarize(b);
    EXPECT_NEAR(sb.mean, 2.0 * sa.mean, 3.0 * std::hypot(sb.se, 2.0 * sa.se));
}

TEST(Summary, Basics) {
    std::vector<RunRecord> rs(4);
    const std::int64_t t[] = {1, 2, 3, 10};
    for (int k = 0; k < 4; ++k)
        rs[static_cast<std::size_t>(k)].t_con = t[k];
    const SummaryStats s = summarize(rs);
    EXPECT_DOUBLE_EQ(s.mean, 4.0);
    EXPECT_DOUBLE_EQ(s.variance, (9.0 + 4.0 + 1.0 + 36.0) / 3.0);
    EXPECT_DOUBLE_EQ(s.se, std::sqrt(s.variance / 4.0));
    EXPECT_TRUE(s.ci_low.has_value());
    EXPECT_DOUBLE_EQ(s.min, 1.0);
    EXPECT_DOUBLE_EQ(s.max, 10.0);
    EXPECT_DOUBLE_EQ(s.markov_tail_fraction, 0.25);
    rs[0].timeout = true;
    const SummaryStats f = summarize(rs);
    EXPECT_EQ(f.timeouts, 1);
    EXPECT_FALSE(f.ci_low.has_value());
    EXPECT_EQ(summarize({}).trials, 0);
}

TEST(Experiment, CompleteThreePsi) {
    const ExperimentResult r = run_experiment(psi_config(R"({"kind": "complete", "n": 3})", 10000, 5));
    const double exact = meeting_time_exact(p_af(build_named(GraphKind::complete, 3))).at(0, 2);
    EXPECT_NEAR(r.summary.mean, exact, 3.0 * r.summary.se);
    EXPECT_FALSE(r.bound_violated());
    EXPECT_LE(r.summary.markov_tail_fraction, 0.5);
}

TEST(Experiment, TwoNodeForced) {
    auto j = nlohmann::json::parse(R"({"algorithm": "AF", "graph": {"kind": "path", "n": 2},
        "initial": {"kind": "explicit", "units": [0, 2]}, "trials": 300, "seed": 8})");
    const ExperimentResult r = run_experiment(config_from_json(j));
    EXPECT_EQ(r.summary.variance, 0.0);
    for (const auto &rec : r.records)
        EXPECT_EQ(rec.t_con, 1);
}

TEST(Experiment, RecordsPassInvariantsAndConverge) {
    auto j = nlohmann::json::parse(R"({"algorithm": "AS", "graph": {"kind": "lollipop", "n": 6, "m": 3},
        "schedule": {"type": "scaled", "b": 2}, "initial": {"kind": "uniform", "target_j": 5},
        "trials": 200, "seed": 3, "outputs": ["tcon", "bounds", "walks"]})");
    const ExperimentResult r = run_experiment(config_from_json(j));
    for (const auto &rec : r.records) {
        EXPECT_NO_THROW(check_record(rec));
        EXPECT_FALSE(rec.timeout);
        QState fin(QuantizerSpec(0, 16, 3), rec.final_units);
        EXPECT_TRUE(has_converged(fin, Rational(rec.initial_sum, rec.n)));
        EXPECT_EQ(rec.j0, 5);
    }
    EXPECT_FALSE(r.bound_violated());
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(r.checks.size(), 2u);
}

TEST(Experiment, RandomGraphAlgorithm) {
    auto j = nlohmann::json::parse(R"({"algorithm": "AR-analysis", "graph": {"kind": "gnp", "n": 5, "p": 0.5},
        "schedule": {"type": "gnp_per_tick"}, "trials": 300, "seed": 4, "outputs": ["bounds", "walks"]})");
    const ExperimentResult r = run_experiment(config_from_json(j));
    EXPECT_FALSE(r.bound_violated());
    const auto it = std::find_if(r.bounds.begin(), r.bounds.end(),
                                 [](const BoundReport &b) { return b.name == "ar_meeting_time"; });
    ASSERT_NE(it, r.bounds.end());
    EXPECT_NEAR(it->value, 1.0 / (2.0 * p0(5, 0.5)), 1e-12);
}

TEST(Experiment, WarnsWithoutPeriodicConnectivity) {
    auto j = nlohmann::json::parse(R"({"algorithm": "AS", "graph": {"kind": "path", "n": 4},
        "schedule": {"type": "scaled", "b": 2}, "window": 1, "trials": 5, "seed": 1, "outputs": []})");
    const ExperimentResult r = run_experiment(config_from_json(j));
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Experiment, ConfigErrors) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"graph": {"kind": "path", "n": 3}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"algorithm": "XX", "graph": {}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(
                     R"({"algorithm": "AF", "graph": {"kind": "path", "n": 3}, "trials": 0})")),
                 ConfigError);
    auto prep = [](const char *s) { return prepare(config_from_json(nlohmann::json::parse(s))); };
    EXPECT_THROW(prep(R"({"algorithm": "AF", "graph": {"kind": "edges", "n": 4, "edges": [[0,1],[2,3]]}})"),
                 ConfigError);
    EXPECT_THROW(prep(R"({"algorithm": "AF", "graph": {"kind": "path", "n": 4}, "schedule": {"type": "scaled", "b": 2}})"),
                 ConfigError);
    EXPECT_THROW(prep(R"({"algorithm": "AR", "graph": {"kind": "path", "n": 4}})"), ConfigError);
    EXPECT_THROW(prep(R"({"algorithm": "AF", "graph": {"kind": "path", "n": 4}, "initial": {"kind": "explicit", "units": [1,2]}})"),
                 ConfigError);
    EXPECT_THROW(prep(R"({"algorithm": "AF", "graph": {"kind": "path", "n": 4}, "initial": {"kind": "explicit", "units": [1,2,3,99]}})"),
                 ConfigError);
    EXPECT_THROW(prep(R"({"algorithm": "AF", "graph": {"kind": "torus", "n": 4}})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Emit, EmptyRecordsGiveHeaderOnly) {
    std::ostringstream os;
    emit_csv(os, {});
    EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n");
}

TEST(Emit, JsonRoundTrip) {
    const ExperimentResult r = run_experiment(psi_config(R"({"kind": "lollipop", "n": 5, "m": 3})", 50, 9));
    const auto j = nlohmann::json::parse(result_to_json(r).dump());
    ASSERT_EQ(j.at("records").size(), r.records.size());
    for (std::size_t k = 0; k < r.records.size(); ++k) {
        const RunRecord back = record_from_json(j.at("records")[k]);
        const RunRecord &orig = r.records[k];
        EXPECT_EQ(back.seed, orig.seed);
        EXPECT_EQ(back.t_con, orig.t_con);
        EXPECT_EQ(back.v0, orig.v0);
        EXPECT_EQ(back.graph_desc, orig.graph_desc);
        EXPECT_EQ(back.nontrivial + back.trivial + back.noop, back.t_con);
        EXPECT_EQ(record_to_json(back).dump(), record_to_json(orig).dump());
    }
    EXPECT_EQ(j.at("summary").at("trials"), 50);
}

TEST(Emit, ReplayIsByteIdentical) {
    const auto cfg = psi_config(R"({"kind": "lollipop", "n": 6, "m": 4})", 300, 77);
    const std::string a = csv_of(run_experiment(cfg));
    auto single = cfg;
    single.threads = 1;
    const std::string b = csv_of(run_experiment(single));
    EXPECT_EQ(a, b);
    auto other = cfg;
    other.seed = 78;
    EXPECT_NE(a, csv_of(run_experiment(other)));
}

TEST(Emit, WritesFile) {
    const auto path = std::filesystem::path(QGOSSIP_TEST_TMP) / "emit_test.csv";
    const ExperimentResult r = run_experiment(psi_config(R"({"kind": "complete", "n": 4})", 20, 2));
    emit(path.string(), r, OutputFormat::csv);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), csv_of(r));
    EXPECT_THROW(emit("/nonexistent/dir/x.csv", r, OutputFormat::csv), std::runtime_error);
}

TEST(Growth, Report) {
    const auto rows = lollipop_growth(4, 6);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].m0, 3);
    EXPECT_NEAR(rows[0].meeting_af, 102.0 / 13.0, 1e-9);
    for (const auto &r : rows)
        EXPECT_GT(r.psi_expected, 0.0);
    EXPECT_NEAR(loglog_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-12);
}
