#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace qgossip {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Row-stochastic matrix of a walk on n states.
class TransitionMatrix {
  public:
    static constexpr double kRowTolerance = 1e-12;

    explicit TransitionMatrix(Matrix p) : p_(std::move(p)) {
        if (p_.rows() != p_.cols() || p_.rows() == 0)
            throw ParameterError("TransitionMatrix: matrix must be square and non-empty");
        for (Eigen::Index i = 0; i < p_.rows(); ++i) {
            for (Eigen::Index j = 0; j < p_.cols(); ++j) {
                const double v = p_(i, j);
                if (!(v >= -kRowTolerance && v <= 1.0 + kRowTolerance))
                    throw ParameterError("TransitionMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") outside [0,1]");
            }
            if (std::abs(p_.row(i).sum() - 1.0) > kRowTolerance)
                throw ParameterError("TransitionMatrix: row " + std::to_string(i) + " does not sum to 1");
        }
    }

    int n() const { return static_cast<int>(p_.rows()); }
    const Matrix &p() const { return p_; }
    double operator()(int i, int j) const { return p_(i, j); }

    bool is_symmetric(double tol = kRowTolerance) const { return (p_ - p_.transpose()).cwiseAbs().maxCoeff() <= tol; }

    bool is_doubly_stochastic(double tol = kRowTolerance) const {
        return (p_.colwise().sum().array() - 1.0).abs().maxCoeff() <= tol;
    }

  private:
    Matrix p_;
};

/// Walk of one AF token: stays with probability 1 - 1/N, else moves to a uniform neighbor.
inline TransitionMatrix p_af(const Graph &g) {
    if (g.n() < 2 || !is_connected(g))
        throw ParameterError("p_af: graph must be connected with n >= 2");
    const int n = g.n();
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double w = 1.0 / (static_cast<double>(n) * g.degree(i));
        for (int j : g.neighbors(i))
            p(i, j) = w;
        p(i, i) = 1.0 - 1.0 / n;
    }
    return TransitionMatrix(std::move(p));
}

/// Simple random walk: uniform neighbor, no self-loops.
inline TransitionMatrix p_sf(const Graph &g) {
    if (g.n() < 2 || !is_connected(g))
        throw ParameterError("p_sf: graph must be connected with n >= 2");
    const int n = g.n();
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j : g.neighbors(i))
            p(i, j) = 1.0 / g.degree(i);
    return TransitionMatrix(std::move(p));
}

/// AS walk on one snapshot: p_ij = 1/(N max(|N_i|,|N_j|)) on edges, isolated nodes stay put.
inline TransitionMatrix p_as(const Graph &g) {
    const int n = g.n();
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (g.degree(i) == 0) {
            p(i, i) = 1.0;
            continue;
        }
        double off = 0.0;
        for (int j : g.neighbors(i)) {
            p(i, j) = 1.0 / (static_cast<double>(n) * std::max(g.degree(i), g.degree(j)));
            off += p(i, j);
        }
        p(i, i) = 1.0 - off;
    }
    return TransitionMatrix(std::move(p));
}

/// Probability that a given directed edge (i, j) is selected in one tick on a fresh G(n, p):
/// i is active, (i, j) is present along with m other edges at i, and i picks j.
inline double p0(int n, double p) {
    if (n < 2)
        throw ParameterError("p0: n must be >= 2");
    if (!(p >= 0.0 && p <= 1.0))
        throw ParameterError("p0: p must lie in [0,1]");
    const int k = n - 2;
    // binomial pmf C(k,m) p^m (1-p)^(k-m), built term by term
    double sum = 0.0;
    double coef = 1.0;
    for (int m = 0; m <= k; ++m) {
        if (m > 0)
            coef = coef * (k - m + 1) / m;
        const double pmf = coef * std::pow(p, m) * std::pow(1.0 - p, k - m);
        sum += p / (m + 1) * pmf;
    }
    return sum / n;
}

/// Effective walk of AF on per-tick G(n, p): uniform off-diagonal p0.
inline TransitionMatrix p_ar(int n, double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw ParameterError("p_ar: p must lie in (0,1]");
    const double q = p0(n, p);
    Matrix m = Matrix::Constant(n, n, q);
    m.diagonal().setConstant(1.0 - (n - 1) * q);
    return TransitionMatrix(std::move(m));
}

namespace detail {

inline void require_reachable(const Matrix &p, const std::vector<char> &is_target) {
    const auto n = p.rows();
    std::vector<char> reach(is_target);
    std::vector<Eigen::Index> stack;
    for (Eigen::Index i = 0; i < n; ++i)
        if (reach[static_cast<std::size_t>(i)])
            stack.push_back(i);
    while (!stack.empty()) {
        const auto k = stack.back();
        stack.pop_back();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!reach[static_cast<std::size_t>(i)] && p(i, k) > 0.0) {
                reach[static_cast<std::size_t>(i)] = 1;
                stack.push_back(i);
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (!reach[static_cast<std::size_t>(i)])
            throw UnboundedHittingTime("target set unreachable from state " + std::to_string(i));
}

/// Solves (I - P_TT) h = 1 over non-target states; h = 0 on the target.
inline Vector solve_hitting(const Matrix &p, const std::vector<char> &is_target) {
    require_reachable(p, is_target);
    const auto n = p.rows();
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!is_target[static_cast<std::size_t>(i)])
            free.push_back(i);
    Vector h = Vector::Zero(n);
    if (free.empty())
        return h;
    const auto m = static_cast<Eigen::Index>(free.size());
    Matrix a(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c)
            a(r, c) = (r == c ? 1.0 : 0.0) - p(free[r], free[c]);
    const Vector ones = Vector::Ones(m);
    Eigen::PartialPivLU<Matrix> lu(a);
    Vector x = lu.solve(ones);
    if (!x.allFinite())
        throw NumericalError("hitting-time system is singular");
    const double residual = (a * x - ones).lpNorm<Eigen::Infinity>();
    if (residual > 1e-10 * std::max(1.0, x.lpNorm<Eigen::Infinity>()))
        throw NumericalError("hitting-time solve residual " + std::to_string(residual) + " above tolerance");
    for (Eigen::Index r = 0; r < m; ++r)
        h(free[r]) = x(r);
    return h;
}

} // namespace detail

/// Expected first-passage times into `target` from every state.
inline Vector hitting_times_exact(const TransitionMatrix &pm, std::span<const int> target) {
    if (target.empty())
        throw ParameterError("hitting_times_exact: empty target set");
    std::vector<char> is_target(static_cast<std::size_t>(pm.n()), 0);
    for (int k : target) {
        if (k < 0 || k >= pm.n())
            throw ParameterError("hitting_times_exact: target state out of range");
        is_target[static_cast<std::size_t>(k)] = 1;
    }
    return detail::solve_hitting(pm.p(), is_target);
}

/// H(i, j): expected time from i to first reach j.
inline Matrix hitting_time_matrix(const TransitionMatrix &pm) {
    const int n = pm.n();
    Matrix h(n, n);
    for (int j = 0; j < n; ++j) {
        const int target[] = {j};
        h.col(j) = hitting_times_exact(pm, target);
    }
    return h;
}

/// How the two tokens of a pair walk move in one tick.
enum class PairMoves {
    /// Both tokens step independently: q = p (x) p.
    independent,
    /// At most one token moves per tick; token A leaves a for k with p_ak, token B likewise.
    exclusive,
    /// Off-diagonal p_ij is the chance that i activates and exchanges values with j.
    /// Tokens ride the exchanges and meet when their two nodes exchange with each other.
    exchange,
};

inline std::string to_string(PairMoves m) {
    switch (m) {
    case PairMoves::independent: return "independent";
    case PairMoves::exclusive: return "exclusive";
    case PairMoves::exchange: return "exchange";
    }
    return "?";
}

inline PairMoves parse_pair_moves(const std::string &s) {
    if (s == "independent") return PairMoves::independent;
    if (s == "exclusive") return PairMoves::exclusive;
    if (s == "exchange") return PairMoves::exchange;
    throw ParameterError("unknown pair-move model '" + s + "'");
}

inline constexpr int kMaxPairChainNodes = 60;

/// Walk of a token pair on V x V, state (a, b) at index a * n + b.
struct ProductChain {
    int base_n = 0;
    PairMoves moves = PairMoves::independent;
    bool absorbed = false;
    Matrix q;

    int index(int a, int b) const { return a * base_n + b; }
    std::pair<int, int> pair(int idx) const { return {idx / base_n, idx % base_n}; }
    bool on_diagonal(int idx) const { return idx / base_n == idx % base_n; }
    int states() const { return base_n * base_n; }
};

namespace detail {

inline Matrix pair_matrix(const Matrix &p, PairMoves moves) {
    const int n = static_cast<int>(p.rows());
    const int n2 = n * n;
    Matrix q = Matrix::Zero(n2, n2);
    switch (moves) {
    case PairMoves::independent:
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    if (p(a, c) == 0.0)
                        continue;
                    for (int d = 0; d < n; ++d)
                        q(a * n + b, c * n + d) = p(a, c) * p(b, d);
                }
        break;
    case PairMoves::exclusive:
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const int r = a * n + b;
                double moved = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k != a) {
                        q(r, k * n + b) += p(a, k);
                        moved += p(a, k);
                    }
                    if (k != b) {
                        q(r, a * n + k) += p(b, k);
                        moved += p(b, k);
                    }
                }
                if (moved > 1.0 + 1e-12)
                    throw ParameterError("exclusive pair chain needs p_aa + p_bb >= 1; walk too mobile");
                q(r, r) += std::max(0.0, 1.0 - moved);
            }
        break;
    case PairMoves::exchange: {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    total += p(i, j);
        if (total > 1.0 + 1e-12)
            throw ParameterError("exchange pair chain needs total off-diagonal mass <= 1");
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const int r = a * n + b;
                double moved = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double w = p(i, j);
                        if (i == j || w == 0.0)
                            continue;
                        moved += w;
                        if (a != b && ((i == a && j == b) || (i == b && j == a))) {
                            q(r, a * n + a) += w;
                            continue;
                        }
                        auto ride = [i, j](int x) { return x == i ? j : (x == j ? i : x); };
                        q(r, ride(a) * n + ride(b)) += w;
                    }
                q(r, r) += std::max(0.0, 1.0 - moved);
            }
        break;
    }
    }
    return q;
}

inline void absorb_rows(Matrix &q, int n) {
    for (int k = 0; k < n; ++k) {
        const int r = k * n + k;
        q.row(r).setZero();
        q(r, r) = 1.0;
    }
}

inline void guard_pair_size(int n) {
    if (n > kMaxPairChainNodes)
        throw ResourceError("pair chain on " + std::to_string(n) + " nodes exceeds the limit of " +
                            std::to_string(kMaxPairChainNodes));
}

} // namespace detail

inline ProductChain product_chain(const TransitionMatrix &pm, PairMoves moves = PairMoves::independent) {
    detail::guard_pair_size(pm.n());
    return ProductChain{pm.n(), moves, false, detail::pair_matrix(pm.p(), moves)};
}

/// Replaces every diagonal-state row with a unit row.
inline ProductChain absorb(ProductChain pc) {
    detail::absorb_rows(pc.q, pc.base_n);
    pc.absorbed = true;
    return pc;
}

/// Walk matrices indexed by tick.
class MatrixSchedule {
  public:
    using Builder = std::function<TransitionMatrix(std::int64_t)>;

    static MatrixSchedule periodic(std::vector<TransitionMatrix> ms) {
        if (ms.empty())
            throw ParameterError("MatrixSchedule::periodic: empty list");
        MatrixSchedule s;
        s.n_ = ms.front().n();
        for (const auto &m : ms)
            if (m.n() != s.n_)
                throw ParameterError("MatrixSchedule::periodic: size mismatch");
        s.stored_ = std::move(ms);
        return s;
    }

    static MatrixSchedule generator(int n, Builder at) {
        MatrixSchedule s;
        s.n_ = n;
        s.builder_ = std::move(at);
        return s;
    }

    /// Walk matrices of a graph schedule under a per-snapshot builder such as p_as.
    static MatrixSchedule from_graphs(const GraphSchedule &gs,
                                      const std::function<TransitionMatrix(const Graph &)> &build) {
        if (gs.kind() == GraphSchedule::Kind::generator)
            return generator(gs.n(), [gs, build](std::int64_t t) { return build(gs.graph_at(t)); });
        std::vector<TransitionMatrix> ms;
        for (std::int64_t t = 0; t < gs.period(); ++t)
            ms.push_back(build(*gs.stored_at(t)));
        return periodic(std::move(ms));
    }

    int n() const { return n_; }
    /// Period of the stored list; 0 for generators.
    std::int64_t period() const { return static_cast<std::int64_t>(stored_.size()); }

    TransitionMatrix at(std::int64_t t) const {
        if (!stored_.empty())
            return stored_[static_cast<std::size_t>(t % period())];
        return builder_(t);
    }

  private:
    int n_ = 0;
    std::vector<TransitionMatrix> stored_;
    Builder builder_;
};

struct MeetingTimes {
    Matrix per_pair;            ///< M(i, j), zero on the diagonal
    double worst = 0.0;         ///< max over pairs
    int worst_i = 0;
    int worst_j = 0;
    PairMoves moves = PairMoves::exclusive;
    double truncation = 0.0;    ///< estimated mass of the truncated tail (schedule case)
    std::int64_t ticks = 0;     ///< iterations used (schedule case)
    std::string start_times;    ///< which start times the sup covers

    double at(int i, int j) const { return per_pair(i, j); }
};

namespace detail {

inline void set_worst(MeetingTimes &mt) {
    const int n = static_cast<int>(mt.per_pair.rows());
    mt.worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mt.per_pair(i, j) > mt.worst) {
                mt.worst = mt.per_pair(i, j);
                mt.worst_i = i;
                mt.worst_j = j;
            }
}

/// Transient (off-diagonal) block of the pair chain.
inline Matrix transient_block(const Matrix &q, int n) {
    const int m = n * n - n;
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(m));
    for (int s = 0; s < n * n; ++s)
        if (s / n != s % n)
            idx.push_back(s);
    Matrix t(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            t(r, c) = q(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    return t;
}

} // namespace detail

/// Exact meeting times of two tokens on a fixed walk: hitting time of the diagonal
/// in the pair chain, solved densely.
inline MeetingTimes meeting_time_exact(const TransitionMatrix &pm, PairMoves moves = PairMoves::exclusive) {
    ProductChain pc = absorb(product_chain(pm, moves));
    const int n = pm.n();
    std::vector<char> diag(static_cast<std::size_t>(n * n), 0);
    for (int k = 0; k < n; ++k)
        diag[static_cast<std::size_t>(k * n + k)] = 1;
    Vector h = detail::solve_hitting(pc.q, diag);
    MeetingTimes mt;
    mt.moves = moves;
    mt.per_pair = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            mt.per_pair(a, b) = h(a * n + b);
    mt.start_times = "fixed";
    detail::set_worst(mt);
    return mt;
}

struct ScheduleMeetingOptions {
    PairMoves moves = PairMoves::exclusive;
    double tail_tolerance = 1e-9;
    std::int64_t max_ticks = 50'000'000;
};

/// Exact meeting times on a time-varying walk: accumulate the surviving (not yet met)
/// mass tick by tick until it falls below the tail tolerance. Periodic schedules take the
/// sup over every start phase; generators only start at t = 0.
inline MeetingTimes meeting_time_exact(const MatrixSchedule &ms, const ScheduleMeetingOptions &opt = {}) {
    const int n = ms.n();
    detail::guard_pair_size(n);
    const int m = n * n - n;
    const std::int64_t period = ms.period();

    std::vector<Matrix> blocks;
    for (std::int64_t ph = 0; ph < period; ++ph)
        blocks.push_back(detail::transient_block(detail::pair_matrix(ms.at(ph).p(), opt.moves), n));

    MeetingTimes mt;
    mt.moves = opt.moves;
    mt.per_pair = Matrix::Zero(n, n);
    mt.start_times = period > 0 ? "all phases of period " + std::to_string(period) : "s=0 only";
    const std::int64_t starts = period > 0 ? period : 1;
    double worst_residual = 0.0;
    for (std::int64_t s = 0; s < starts; ++s) {
        Matrix r = Matrix::Identity(m, m); // row = start pair, column = current pair
        Vector h = Vector::Ones(m);
        Vector surv = Vector::Ones(m);
        std::int64_t tau = 0;
        while (surv.maxCoeff() > opt.tail_tolerance) {
            if (tau >= opt.max_ticks)
                throw NumericalError("meeting time did not settle within " + std::to_string(opt.max_ticks) +
                                     " ticks; the schedule may not be periodically connected");
            const std::int64_t t = s + tau;
            if (period > 0)
                r = r * blocks[static_cast<std::size_t>(t % period)];
            else
                r = r * detail::transient_block(detail::pair_matrix(ms.at(t).p(), opt.moves), n);
            surv = r.rowwise().sum();
            h += surv;
            ++tau;
        }
        mt.ticks = std::max(mt.ticks, tau);
        worst_residual = std::max(worst_residual, surv.maxCoeff());
        int row = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) {
                    mt.per_pair(a, b) = std::max(mt.per_pair(a, b), h(row));
                    ++row;
                }
    }
    detail::set_worst(mt);
    // Conditional on survival, the expected remaining time is at most the worst meeting time.
    mt.truncation = worst_residual * mt.worst;
    return mt;
}

/// theta_Theta(t) for t = 0..ticks: mass on the diagonal of the pair walk started at (i1, i2).
inline std::vector<double> diagonal_mass(const MatrixSchedule &ms, int i1, int i2, std::int64_t ticks,
                                         PairMoves moves = PairMoves::independent, bool absorbed = false) {
    const int n = ms.n();
    detail::guard_pair_size(n);
    std::vector<Matrix> cache;
    for (std::int64_t ph = 0; ph < ms.period(); ++ph) {
        Matrix q = detail::pair_matrix(ms.at(ph).p(), moves);
        if (absorbed)
            detail::absorb_rows(q, n);
        cache.push_back(std::move(q));
    }
    Eigen::RowVectorXd theta = Eigen::RowVectorXd::Zero(n * n);
    theta(i1 * n + i2) = 1.0;
    auto on_diag = [n](const Eigen::RowVectorXd &v) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += v(k * n + k);
        return s;
    };
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(ticks + 1));
    out.push_back(on_diag(theta));
    for (std::int64_t t = 0; t < ticks; ++t) {
        if (!cache.empty()) {
            theta = theta * cache[static_cast<std::size_t>(t % ms.period())];
        } else {
            Matrix q = detail::pair_matrix(ms.at(t).p(), moves);
            if (absorbed)
                detail::absorb_rows(q, n);
            theta = theta * q;
        }
        out.push_back(on_diag(theta));
    }
    return out;
}

/// How a chosen token picks its move on the current snapshot.
enum class TokenRule { af, as };

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t trials = 0;
    std::int64_t capped = 0; ///< trials that hit the tick cap (counted at the cap)
    bool flagged() const { return capped > 0; }
};

namespace detail {

inline int move_token(int at, const Graph &g, TokenRule rule, Rng &rng) {
    auto nb = g.neighbors(at);
    if (nb.empty())
        return at;
    if (rule == TokenRule::af)
        return nb[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(nb.size())))];
    const double u = uniform01(rng);
    double acc = 0.0;
    const int da = static_cast<int>(nb.size());
    for (int j : nb) {
        acc += 1.0 / static_cast<double>(std::max(da, g.degree(j)));
        if (u < acc)
            return j;
    }
    return at;
}

} // namespace detail

/// Ticks until two tokens started at a and b first share a node. Each tick one node-clock
/// fires: token A's node with probability 1/N, token B's with 1/N, otherwise nothing moves.
inline std::int64_t meeting_ticks_once(const GraphSchedule &schedule, int a, int b, TokenRule rule,
                                       std::uint64_t seed, std::int64_t max_ticks) {
    Rng rng(seed);
    ScheduleCursor cursor(schedule);
    const int n = schedule.n();
    std::int64_t t = 0;
    while (a != b && t < max_ticks) {
        const int c = uniform_index(rng, n);
        if (c == 0)
            a = detail::move_token(a, cursor.at(t), rule, rng);
        else if (c == 1)
            b = detail::move_token(b, cursor.at(t), rule, rng);
        ++t;
    }
    return t;
}

inline McEstimate meeting_time_mc(const GraphSchedule &schedule, int a, int b, TokenRule rule, std::int64_t trials,
                                  std::uint64_t seed, std::int64_t max_ticks = 10'000'000) {
    if (trials < 1)
        throw ParameterError("meeting_time_mc: trials must be >= 1");
    if (a < 0 || b < 0 || a >= schedule.n() || b >= schedule.n())
        throw ParameterError("meeting_time_mc: start nodes out of range");
    McEstimate est;
    est.trials = trials;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t k = 0; k < trials; ++k) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
        const GraphSchedule sched = schedule.reseeded(mix64(s ^ 0x5bd1e995ULL));
        const std::int64_t t = meeting_ticks_once(sched, a, b, rule, s, max_ticks);
        if (t >= max_ticks && max_ticks > 0)
            ++est.capped;
        sum += static_cast<double>(t);
        sumsq += static_cast<double>(t) * static_cast<double>(t);
    }
    const auto nt = static_cast<double>(trials);
    est.mean = sum / nt;
    if (trials > 1) {
        const double var = std::max(0.0, (sumsq - nt * est.mean * est.mean) / (nt - 1.0));
        est.se = std::sqrt(var / nt);
    }
    return est;
}

struct ReversibilityResult {
    bool reversible = false;
    Vector pi; ///< normalized stationary vector that was tested
};

inline bool is_stationary(const TransitionMatrix &pm, const Vector &pi, double tol = 1e-12) {
    return (pm.p().transpose() * pi - pi).lpNorm<Eigen::Infinity>() <= tol;
}

inline bool detailed_balance_holds(const TransitionMatrix &pm, const Vector &pi, double tol = 1e-12) {
    const int n = pm.n();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pi(i) * pm(i, j) - pi(j) * pm(j, i)) > tol)
                return false;
    return true;
}

/// Tests stationarity and detailed balance of pm against pi_i proportional to |N_i|.
inline ReversibilityResult reversibility_check(const TransitionMatrix &pm, const Graph &g) {
    if (pm.n() != g.n())
        throw ParameterError("reversibility_check: size mismatch");
    ReversibilityResult res;
    res.pi = Vector(g.n());
    const double dmax = g.max_degree();
    for (int i = 0; i < g.n(); ++i)
        res.pi(i) = g.degree(i) / dmax;
    res.pi /= res.pi.sum();
    res.reversible = is_stationary(pm, res.pi) && detailed_balance_holds(pm, res.pi);
    return res;
}

/// Row-major CSV, full double precision.
inline void write_matrix_csv(std::ostream &os, const Matrix &m) {
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            os << (j ? "," : "") << buf;
        }
        os << '\n';
    }
}

/// One hitting/meeting result as {pair, value, method, se?, truncation?}.
inline nlohmann::ordered_json walk_result_json(int i, int j, double value, const std::string &method,
                                               std::optional<double> se = std::nullopt,
                                               std::optional<double> truncation = std::nullopt) {
    nlohmann::ordered_json o;
    o["pair"] = {i, j};
    o["value"] = value;
    o["method"] = method;
    if (se)
        o["se"] = *se;
    if (truncation)
        o["truncation"] = *truncation;
    return o;
}

} // namespace qgossip
