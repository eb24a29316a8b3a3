#include <random>

#include <gtest/gtest.h>

#include <qgossip/quantization.hpp>

using namespace qgossip;

namespace {

const QuantizerSpec kSpec16{0.0, 16.0, 3}; // delta = 2

QState units_state(std::vector<Units> u, int r = 8) { return QState(QuantizerSpec(0.0, 1.0, r), std::move(u)); }

} // namespace

TEST(Quantizer, Derived) {
    EXPECT_EQ(kSpec16.levels(), 8);
    EXPECT_DOUBLE_EQ(kSpec16.delta(), 2.0);
    EXPECT_DOUBLE_EQ(kSpec16.value(7), 14.0);
    EXPECT_THROW(QuantizerSpec(1.0, 1.0, 3), ParameterError);
    EXPECT_THROW(QuantizerSpec(0.0, 1.0, 0), ParameterError);
}

TEST(Quantizer, Examples) {
    EXPECT_DOUBLE_EQ(quantize(5.0, kSpec16), 4.0);
    EXPECT_DOUBLE_EQ(quantize(0.0, kSpec16), 0.0);
    EXPECT_DOUBLE_EQ(quantize(16.0, kSpec16), 14.0);
    EXPECT_THROW(quantize(-0.5, kSpec16), RangeError);
    EXPECT_THROW(quantize(16.01, kSpec16), RangeError);
}

TEST(Quantizer, IdempotentOnLevels) {
    for (const QuantizerSpec &s : {kSpec16, QuantizerSpec(-1.0, 0.3, 5), QuantizerSpec(0.1, 0.7, 10)})
        for (Units k = 0; k < s.levels(); ++k)
            EXPECT_EQ(quantize(s.value(k), s), s.value(k)) << "k=" << k;
}

TEST(Quantizer, FloorProperty) {
    const QuantizerSpec s(-1.0, 0.3, 5);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(s.u_min(), s.u_max());
    for (int i = 0; i < 20000; ++i) {
        const double x = u(rng);
        if (x >= s.u_max())
            continue;
        const double q = quantize(x, s);
        EXPECT_LE(q, x);
        EXPECT_LT(x, q + s.delta());
    }
}

TEST(QState, Validation) {
    EXPECT_THROW(QState(kSpec16, {}), ParameterError);
    EXPECT_THROW(QState(kSpec16, {0, 9}), RangeError);
    EXPECT_THROW(QState(kSpec16, {-1, 0}), RangeError);
    EXPECT_NO_THROW(QState(kSpec16, {0, 8}));
    EXPECT_EQ(QState::from_values(kSpec16, {0.0, 4.0, 16.0}).units(), (std::vector<Units>{0, 2, 8}));
    EXPECT_THROW(QState::from_values(kSpec16, {3.0}), ParameterError);
}

TEST(QState, Mean) {
    EXPECT_EQ(mean_units(units_state({0, 1, 2})), Rational(1));
    EXPECT_EQ(mean_units(QState(kSpec16, {0, 1})), Rational(1, 2));
    EXPECT_DOUBLE_EQ(mean_value(QState(kSpec16, {0, 1})), 1.0);
    const QState c(QuantizerSpec(5.0, 21.0, 3), {3, 3, 3});
    EXPECT_EQ(mean_units(c), Rational(3));
    EXPECT_DOUBLE_EQ(mean_value(c), 5.0 + 3 * 2.0);
}

TEST(QState, Lyapunov) {
    EXPECT_EQ(lyapunov(units_state({4, 4, 4}), Rational(4)), Rational(0));
    EXPECT_EQ(lyapunov(units_state({0, 1, 2}), Rational(1)), Rational(2));
    EXPECT_EQ(lyapunov_about_mean(units_state({0, 1, 2})), Rational(2));
    EXPECT_EQ(lyapunov_about_mean(units_state({0, 1})), Rational(1, 2));
}

TEST(QState, Spread) {
    EXPECT_EQ(spread_j(units_state({5, 5, 5})), 0);
    EXPECT_EQ(spread_j(units_state({0, 1, 1, 1, 2})), 2);
    EXPECT_EQ(spread_j(QState(kSpec16, {0, 8})), 8);
}

TEST(QState, Distribution) {
    using D = std::vector<std::pair<Units, int>>;
    EXPECT_EQ(distribution(units_state({1, 1, 1})), (D{{1, 3}}));
    EXPECT_EQ(distribution(units_state({0, 1, 1, 2})), (D{{0, 1}, {1, 2}, {2, 1}}));
    EXPECT_EQ(distribution(units_state({0, 1, 1, 1, 2})), (D{{0, 1}, {1, 3}, {2, 1}}));
}

TEST(QState, BudgetEqualityCase) {
    const QState x(kSpec16, {0, 8});
    const Rational budget = lyapunov_about_mean(x) / Rational(2);
    EXPECT_EQ(budget, Rational(8 * 8, 4));
    EXPECT_EQ(budget, Rational(2 * 8 * 8, 8));
}

TEST(QState, TranslationInvarianceAndPopoviciu) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        std::vector<Units> u(static_cast<std::size_t>(n));
        for (auto &k : u)
            k = static_cast<Units>(rng() % 50);
        const QState x = units_state(u);
        const Units shift = static_cast<Units>(rng() % 100);
        std::vector<Units> v = u;
        for (auto &k : v)
            k += shift;
        const QState y = units_state(v);
        EXPECT_EQ(spread_j(x), spread_j(y));
        EXPECT_EQ(lyapunov_about_mean(x), lyapunov_about_mean(y));
        EXPECT_EQ(lyapunov(x, mean_units(x)), lyapunov_about_mean(x));
        const Units j = spread_j(x);
        EXPECT_LE(lyapunov_about_mean(x) / Rational(2), Rational(n * j * j, 8));
    }
}

TEST(QState, JsonRoundTrip) {
    const QState x(QuantizerSpec(-2.5, 3.5, 4), {0, 3, 16, 7});
    const auto j = state_to_json(x);
    EXPECT_EQ(j.at("units"), nlohmann::json({0, 3, 16, 7}));
    EXPECT_EQ(j.at("spec").at("r"), 4);
    EXPECT_EQ(state_from_json(nlohmann::json::parse(j.dump())), x);
}
