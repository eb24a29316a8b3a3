#pragma once

// Closed-form convergence-time quantities. All inputs are plain numbers so the
// evaluators can be called without building any graph.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "quantization.hpp"
#include "randwalk.hpp"

namespace qgossip {

struct BoundReport {
    std::string name;
    std::map<std::string, double> inputs;
    double value = 0.0;
    std::string source;
};

inline void to_json(nlohmann::json &j, const BoundReport &b) {
    j = nlohmann::json{{"name", b.name}, {"inputs", b.inputs}, {"value", b.value}, {"source", b.source}};
}

/// Meeting time under the AF walk is at most 2 N H_sf - N.
inline double bound_prop1(int n, double h_sf_max) {
    if (h_sf_max < 1.0)
        throw ParameterError("bound_prop1: h_sf_max must be >= 1");
    return 2.0 * n * h_sf_max - n;
}

/// Worst-case simple-walk hitting time on any connected n-node graph: 4 n^3 / 27.
inline double bound_hsf_cubic(int n) {
    if (n < 2)
        throw ParameterError("bound_hsf_cubic: n must be >= 2");
    return 4.0 * std::pow(n, 3) / 27.0;
}

/// AF expected convergence time: (n^2 J^2 / 8) (8 n^3 / 27 - 1).
inline double bound_thm2(int n, std::int64_t j0) {
    if (n < 2 || j0 < 1)
        throw ParameterError("bound_thm2: need n >= 2 and j0 >= 1");
    const double nd = n, jd = static_cast<double>(j0);
    return nd * nd * jd * jd / 8.0 * (8.0 / 27.0 * nd * nd * nd - 1.0);
}

/// Least integer strictly greater than b (8 n^6 ln(sqrt(2) n) + 1).
inline std::int64_t t1(int n, int b) {
    if (n < 2 || b < 1)
        throw ParameterError("t1: need n >= 2 and b >= 1");
    const double x = b * (8.0 * std::pow(n, 6) * std::log(std::sqrt(2.0) * n) + 1.0);
    return static_cast<std::int64_t>(std::floor(x)) + 1;
}

/// AS meeting time on a B-periodically connected schedule: at most 4 n t1.
inline double bound_prop2(int n, int b) { return 4.0 * n * static_cast<double>(t1(n, b)); }

/// AS expected convergence time: (1/2) B J^2 n^2 (16 n^7 + 1).
inline double bound_thm6(int n, int b, std::int64_t j0) {
    if (n < 2 || b < 1 || j0 < 1)
        throw ParameterError("bound_thm6: need n >= 2, b >= 1, j0 >= 1");
    const double nd = n, jd = static_cast<double>(j0);
    return 0.5 * b * jd * jd * nd * nd * (16.0 * std::pow(nd, 7) + 1.0);
}

struct ArBound {
    double exact = 0.0;          ///< n J^2 / (16 p0)
    double relaxed = 0.0;        ///< n^2 (n-1) J^2 / (32 p)
    double relaxed_safe = 0.0;   ///< n^2 (n-1) J^2 / (16 p), from p0 >= p / (n (n-1))
    bool relaxation_holds = false; ///< exact <= relaxed
};

/// Random-graph (per-tick G(n,p)) convergence bound in exact and relaxed form.
/// The relaxed form leans on p0 >= 2p/(n(n-1)), which does not hold for every (n, p);
/// `relaxation_holds` reports whether it does for these inputs.
inline ArBound bound_ar(int n, double p, std::int64_t j0) {
    if (!(p > 0.0 && p <= 1.0))
        throw ParameterError("bound_ar: p must lie in (0,1]");
    const double nd = n, jd = static_cast<double>(j0);
    ArBound b;
    b.exact = nd * jd * jd / (16.0 * p0(n, p));
    b.relaxed = nd * nd * (nd - 1.0) * jd * jd / (32.0 * p);
    b.relaxed_safe = 2.0 * b.relaxed;
    b.relaxation_holds = b.exact <= b.relaxed;
    return b;
}

struct NontrivialBudget {
    Rational lyapunov_bound; ///< V_mean(x0) / (2 delta^2)
    Rational spread_bound;   ///< n J^2 / 8
};

/// Cap on the number of non-trivial exchanges from x0, and its spread relaxation.
inline NontrivialBudget nontrivial_budget(const QState &x0) {
    NontrivialBudget b;
    b.lyapunov_bound = lyapunov_about_mean(x0) / Rational(2);
    const Units j = spread_j(x0);
    b.spread_bound = Rational(static_cast<std::int64_t>(x0.size()) * j * j, 8);
    if (b.lyapunov_bound > b.spread_bound)
        throw InvariantViolation("nontrivial_budget: V/(2 delta^2) exceeds n J^2 / 8");
    return b;
}

// BoundReport builders used by the harness.

inline BoundReport report_thm2(int n, std::int64_t j0) {
    return {"thm2_af_convergence", {{"N", n}, {"J", static_cast<double>(j0)}}, bound_thm2(n, j0),
            "AF expected convergence time: N^2 J^2/8 (8N^3/27 - 1)"};
}

inline BoundReport report_prop1(int n, double h_sf_max) {
    return {"prop1_af_meeting", {{"N", n}, {"H_sf", h_sf_max}}, bound_prop1(n, h_sf_max),
            "AF meeting time: 2 N H_sf - N"};
}

inline BoundReport report_t1(int n, int b) {
    return {"t1", {{"N", n}, {"B", b}}, static_cast<double>(t1(n, b)),
            "least integer > B(8N^6 ln(sqrt(2) N) + 1)"};
}

inline BoundReport report_prop2(int n, int b) {
    return {"prop2_as_meeting", {{"N", n}, {"B", b}}, bound_prop2(n, b), "AS meeting time: 4 N t1"};
}

inline BoundReport report_thm6(int n, int b, std::int64_t j0) {
    return {"thm6_as_convergence", {{"N", n}, {"B", b}, {"J", static_cast<double>(j0)}}, bound_thm6(n, b, j0),
            "AS expected convergence time: B J^2 N^2 (16 N^7 + 1)/2"};
}

inline BoundReport report_ar_exact(int n, double p, std::int64_t j0) {
    return {"ar_convergence_exact", {{"N", n}, {"p", p}, {"J", static_cast<double>(j0)}}, bound_ar(n, p, j0).exact,
            "G(N,p) expected convergence time: N J^2 / (16 p0)"};
}

inline BoundReport report_ar_relaxed(int n, double p, std::int64_t j0) {
    return {"ar_convergence_relaxed", {{"N", n}, {"p", p}, {"J", static_cast<double>(j0)}},
            bound_ar(n, p, j0).relaxed, "G(N,p) relaxed: N^2 (N-1) J^2 / (32 p)"};
}

} // namespace qgossip
