#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "quantization.hpp"
#include "rng.hpp"

namespace qgossip {

/// af: fixed connected graph, uniform neighbor.
/// as: switching graph, neighbor j with probability 1/max(|N_i|, |N_j|).
/// ar: uniform-neighbor rule on a per-tick random graph; an isolated active node does nothing.
enum class Algorithm { af, as, ar };

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::af: return "AF";
    case Algorithm::as: return "AS";
    case Algorithm::ar: return "AR";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string &s) {
    if (s == "AF" || s == "af") return Algorithm::af;
    if (s == "AS" || s == "as") return Algorithm::as;
    if (s == "AR" || s == "ar" || s == "AR-analysis") return Algorithm::ar;
    throw ParameterError("unknown algorithm '" + s + "'");
}

enum class EventKind { noop, trivial, nontrivial };

struct TickEvent {
    std::int64_t t = 0;
    int active = -1;
    std::optional<int> partner;
    Units delta = 0;
    EventKind kind = EventKind::noop;
};

/// Exchange amount for a pair whose values differ by d units: ceil(d / 2).
/// Even d meets exactly in the middle; odd d leaves the pair one unit apart, swapped when d = 1.
constexpr Units compute_delta(Units d) {
    if (d < 0)
        throw ParameterError("compute_delta: difference must be non-negative");
    return (d + 1) / 2;
}

/// Applies the pairwise update to nodes i and j; the larger value gives delta to the smaller.
inline TickEvent exchange(std::vector<Units> &units, int i, int j) {
    TickEvent ev;
    ev.active = i;
    ev.partner = j;
    Units &a = units[static_cast<std::size_t>(i)];
    Units &b = units[static_cast<std::size_t>(j)];
    const Units d = a > b ? a - b : b - a;
    if (d == 0)
        return ev;
    ev.delta = compute_delta(d);
    ev.kind = d == 1 ? EventKind::trivial : EventKind::nontrivial;
    if (a > b) {
        a -= ev.delta;
        b += ev.delta;
    } else {
        a += ev.delta;
        b -= ev.delta;
    }
    return ev;
}

namespace detail {

inline TickEvent uniform_partner_step(std::vector<Units> &units, const Graph &g, Rng &rng, bool allow_isolated) {
    const int i = uniform_index(rng, g.n());
    auto nb = g.neighbors(i);
    if (nb.empty()) {
        if (!allow_isolated)
            throw std::logic_error("af_step: node " + std::to_string(i) + " has no neighbors on a graph that must be connected");
        TickEvent ev;
        ev.active = i;
        return ev;
    }
    const int j = nb[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(nb.size())))];
    return exchange(units, i, j);
}

} // namespace detail

/// One AF tick: uniform active node, uniform neighbor.
inline TickEvent af_step(QState &x, const Graph &g, Rng &rng) {
    return detail::uniform_partner_step(x.units(), g, rng, false);
}

/// AF selection rule on a graph that may contain isolated nodes.
inline TickEvent ar_step(QState &x, const Graph &g, Rng &rng) {
    return detail::uniform_partner_step(x.units(), g, rng, true);
}

/// One AS tick. The mass left over after the 1/max(|N_i|,|N_j|) choices is a no-op,
/// so the (active, partner) law equals the AS walk matrix entry by entry.
inline TickEvent as_step(QState &x, const Graph &g, Rng &rng) {
    const int i = uniform_index(rng, g.n());
    TickEvent ev;
    ev.active = i;
    auto nb = g.neighbors(i);
    if (nb.empty())
        return ev;
    const int di = static_cast<int>(nb.size());
    const double u = uniform01(rng);
    double acc = 0.0;
    for (int j : nb) {
        acc += 1.0 / static_cast<double>(std::max(di, g.degree(j)));
        if (u < acc)
            return exchange(x.units(), i, j);
    }
    return ev;
}

inline TickEvent step(Algorithm alg, QState &x, const Graph &g, Rng &rng) {
    switch (alg) {
    case Algorithm::af: return af_step(x, g, rng);
    case Algorithm::as: return as_step(x, g, rng);
    case Algorithm::ar: return ar_step(x, g, rng);
    }
    throw std::logic_error("step: bad algorithm");
}

/// Allowed unit values of the target set W given the initial mean (in units):
/// {mean} when the mean is a level, else {floor(mean), floor(mean) + 1}.
struct TargetSet {
    Units low = 0;
    Units high = 0;

    explicit TargetSet(const Rational &xbar0) {
        low = xbar0.numerator() / xbar0.denominator(); // units are non-negative
        high = xbar0.denominator() == 1 ? low : low + 1;
    }

    bool contains(Units k) const { return k >= low && k <= high; }
};

inline bool has_converged(std::span<const Units> units, const Rational &xbar0) {
    TargetSet w(xbar0);
    for (Units k : units)
        if (!w.contains(k))
            return false;
    return true;
}

inline bool has_converged(const QState &x, const Rational &xbar0) { return has_converged(x.units(), xbar0); }

/// Outcome of one trajectory.
struct RunRecord {
    Algorithm algorithm = Algorithm::af;
    int n = 0;
    std::string graph_desc;
    std::uint64_t seed = 0;
    std::int64_t t_con = 0; ///< ticks until W was entered; equals max_ticks on timeout
    bool timeout = false;
    std::int64_t nontrivial = 0;
    std::int64_t trivial = 0;
    std::int64_t noop = 0;
    Units j0 = 0;
    Rational v0 = 0; ///< V_mean(x(0)) in units of delta^2

    // In-memory only; not serialized.
    std::vector<Units> final_units;
    Units initial_sum = 0;
};

/// Throws InvariantViolation if the record breaks sum conservation or the non-trivial budget.
inline void check_record(const RunRecord &r) {
    if (!r.final_units.empty()) {
        Units s = 0;
        for (Units k : r.final_units)
            s += k;
        if (s != r.initial_sum)
            throw InvariantViolation("run seed " + std::to_string(r.seed) + ": sum of units changed");
    }
    if (Rational(2 * r.nontrivial) > r.v0)
        throw InvariantViolation("run seed " + std::to_string(r.seed) + ": non-trivial events exceed V0/(2 delta^2)");
    if (r.nontrivial + r.trivial + r.noop != r.t_con)
        throw InvariantViolation("run seed " + std::to_string(r.seed) + ": event tallies do not sum to t_con");
}

/// Runs until x enters W(x(0)) or max_ticks elapse. Bit-exact under a fixed seed.
inline RunRecord run(Algorithm alg, const GraphSchedule &schedule, const QState &x0, std::uint64_t seed,
                     std::int64_t max_ticks) {
    if (x0.size() != schedule.n())
        throw ParameterError("run: state size does not match schedule node count");
    if (alg == Algorithm::af) {
        if (schedule.kind() != GraphSchedule::Kind::constant)
            throw ParameterError("run: AF requires a constant schedule");
        if (!is_connected(schedule.graph_at(0)))
            throw ParameterError("run: AF requires a connected graph");
    }
    RunRecord rec;
    rec.algorithm = alg;
    rec.n = x0.size();
    rec.graph_desc = schedule.description();
    rec.seed = seed;
    rec.j0 = spread_j(x0);
    rec.v0 = lyapunov_about_mean(x0);
    rec.initial_sum = x0.sum();

    QState x = x0;
    const TargetSet w(mean_units(x0));
    int outside = 0;
    for (Units k : x.units())
        outside += !w.contains(k);

    Rng rng(seed);
    ScheduleCursor cursor(schedule);
    std::int64_t t = 0;
    while (outside > 0 && t < max_ticks) {
        const Graph &g = cursor.at(t);
        TickEvent ev = step(alg, x, g, rng);
        ++t;
        switch (ev.kind) {
        case EventKind::noop: ++rec.noop; break;
        case EventKind::trivial: ++rec.trivial; break;
        case EventKind::nontrivial: ++rec.nontrivial; break;
        }
        if (ev.kind != EventKind::noop) {
            outside = 0;
            for (Units k : x.units())
                outside += !w.contains(k);
        }
    }
    rec.t_con = t;
    rec.timeout = outside > 0;
    rec.final_units = x.units();
    return rec;
}

} // namespace qgossip
