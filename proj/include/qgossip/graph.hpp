#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace qgossip {

/// Unordered node pair, stored with first < second.
using Edge = std::pair<int, int>;

/// Undirected simple graph on nodes 0..n-1.
class Graph {
  public:
    Graph() = default;

    Graph(int n, std::vector<Edge> edges) : n_(n) {
        if (n < 1)
            throw ParameterError("Graph: node count must be >= 1, got " + std::to_string(n));
        for (auto &[a, b] : edges) {
            if (a < 0 || b < 0 || a >= n || b >= n)
                throw ParameterError("Graph: edge (" + std::to_string(a) + "," + std::to_string(b) +
                                     ") out of range for n=" + std::to_string(n));
            if (a == b)
                throw ParameterError("Graph: self-loop at node " + std::to_string(a));
            if (a > b)
                std::swap(a, b);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        adj_.assign(n, {});
        for (const auto &[a, b] : edges_) {
            adj_[a].push_back(b);
            adj_[b].push_back(a);
        }
        for (auto &nb : adj_)
            std::sort(nb.begin(), nb.end());
    }

    static Graph empty(int n) { return Graph(n, {}); }

    int n() const { return n_; }
    const std::vector<Edge> &edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::span<const int> neighbors(int i) const { return adj_[i]; }
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }

    bool has_edge(int i, int j) const {
        const auto &nb = adj_[i];
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    int max_degree() const {
        int d = 0;
        for (const auto &nb : adj_)
            d = std::max(d, static_cast<int>(nb.size()));
        return d;
    }

    bool operator==(const Graph &other) const { return n_ == other.n_ && edges_ == other.edges_; }

  private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

enum class GraphKind { path, cycle, star, complete, lollipop };

inline GraphKind parse_graph_kind(const std::string &name) {
    if (name == "path") return GraphKind::path;
    if (name == "cycle") return GraphKind::cycle;
    if (name == "star") return GraphKind::star;
    if (name == "complete") return GraphKind::complete;
    if (name == "lollipop") return GraphKind::lollipop;
    throw ParameterError("unknown graph kind '" + name + "'");
}

inline std::string to_string(GraphKind kind) {
    switch (kind) {
    case GraphKind::path: return "path";
    case GraphKind::cycle: return "cycle";
    case GraphKind::star: return "star";
    case GraphKind::complete: return "complete";
    case GraphKind::lollipop: return "lollipop";
    }
    return "?";
}

/// Comma-free descriptor, safe for a CSV cell.
inline std::string describe(GraphKind kind, int n, int m = 0) {
    std::string s = to_string(kind) + "(n=" + std::to_string(n);
    if (kind == GraphKind::lollipop)
        s += ";m=" + std::to_string(m);
    return s + ")";
}

/// Named graph. The lollipop is a clique on {0..m-1} with the path
/// m-1, m, ..., n-1 hanging off clique node m-1; node n-1 is the far end.
inline Graph build_named(GraphKind kind, int n, int m = 0) {
    if (n < 2)
        throw ParameterError("build_named: n must be >= 2, got " + std::to_string(n));
    std::vector<Edge> e;
    switch (kind) {
    case GraphKind::path:
        for (int i = 0; i + 1 < n; ++i)
            e.emplace_back(i, i + 1);
        break;
    case GraphKind::cycle:
        for (int i = 0; i + 1 < n; ++i)
            e.emplace_back(i, i + 1);
        e.emplace_back(0, n - 1);
        break;
    case GraphKind::star:
        for (int i = 1; i < n; ++i)
            e.emplace_back(0, i);
        break;
    case GraphKind::complete:
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                e.emplace_back(i, j);
        break;
    case GraphKind::lollipop:
        if (m < 2 || m > n)
            throw ParameterError("build_named: lollipop clique size must satisfy 2 <= m <= n, got m=" +
                                 std::to_string(m) + " n=" + std::to_string(n));
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                e.emplace_back(i, j);
        for (int i = m - 1; i + 1 < n; ++i)
            e.emplace_back(i, i + 1);
        break;
    }
    return Graph(n, std::move(e));
}

/// Erdos-Renyi G(n, p); pairs visited in lexicographic order.
inline Graph sample_gnp(int n, double p, std::uint64_t seed) {
    if (n < 2)
        throw ParameterError("sample_gnp: n must be >= 2");
    if (!(p >= 0.0 && p <= 1.0))
        throw ParameterError("sample_gnp: p must lie in [0,1], got " + std::to_string(p));
    Rng rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng))
                e.emplace_back(i, j);
    return Graph(n, std::move(e));
}

inline bool is_connected(const Graph &g) {
    const int n = g.n();
    if (n <= 1)
        return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : g.neighbors(u)) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

inline Graph union_graph(std::span<const Graph> graphs) {
    if (graphs.empty())
        throw ParameterError("union_graph: empty list");
    const int n = graphs.front().n();
    std::vector<Edge> e;
    for (const auto &g : graphs) {
        if (g.n() != n)
            throw ParameterError("union_graph: node counts differ (" + std::to_string(n) + " vs " +
                                 std::to_string(g.n()) + ")");
        e.insert(e.end(), g.edges().begin(), g.edges().end());
    }
    return Graph(n, std::move(e));
}

/// Time-varying topology on a fixed node set.
class GraphSchedule {
  public:
    enum class Kind { constant, periodic, generator };
    /// Draws the graph of one tick from that tick's seed.
    using Sampler = std::function<Graph(std::uint64_t tick_seed)>;

    static GraphSchedule constant(Graph g, std::string desc = "graph") {
        GraphSchedule s;
        s.kind_ = Kind::constant;
        s.n_ = g.n();
        s.graphs_.push_back(std::move(g));
        s.desc_ = std::move(desc);
        return s;
    }

    static GraphSchedule periodic(std::vector<Graph> graphs, std::string desc = "periodic") {
        if (graphs.empty())
            throw ParameterError("GraphSchedule::periodic: need at least one graph");
        for (const auto &g : graphs)
            if (g.n() != graphs.front().n())
                throw ParameterError("GraphSchedule::periodic: node counts differ");
        GraphSchedule s;
        s.kind_ = Kind::periodic;
        s.n_ = graphs.front().n();
        s.graphs_ = std::move(graphs);
        s.desc_ = std::move(desc);
        return s;
    }

    static GraphSchedule generator(int n, Sampler sampler, std::uint64_t seed, std::string desc) {
        GraphSchedule s;
        s.kind_ = Kind::generator;
        s.n_ = n;
        s.sampler_ = std::move(sampler);
        s.seed_ = seed;
        s.desc_ = std::move(desc);
        return s;
    }

    /// Fresh G(n, p) at every tick.
    static GraphSchedule gnp(int n, double p, std::uint64_t seed) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ParameterError("GraphSchedule::gnp: p must lie in [0,1]");
        std::ostringstream d;
        d << "gnp(n=" << n << ";p=" << p << ")";
        return generator(n, [n, p](std::uint64_t s) { return sample_gnp(n, p, s); }, seed, d.str());
    }

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    std::uint64_t seed() const { return seed_; }
    const std::string &description() const { return desc_; }

    /// Number of stored graphs (1 for constant); 0 for generators.
    std::int64_t period() const { return kind_ == Kind::generator ? 0 : static_cast<std::int64_t>(graphs_.size()); }

    /// Stored graph for tick t, or nullptr for generator schedules.
    const Graph *stored_at(std::int64_t t) const {
        if (kind_ == Kind::generator)
            return nullptr;
        return &graphs_[static_cast<std::size_t>(t % static_cast<std::int64_t>(graphs_.size()))];
    }

    Graph graph_at(std::int64_t t) const {
        if (const Graph *g = stored_at(t))
            return *g;
        return sampler_(derive_seed(seed_, static_cast<std::uint64_t>(t)));
    }

    /// Same schedule with a different generator seed; identity for stored schedules.
    GraphSchedule reseeded(std::uint64_t seed) const {
        GraphSchedule s = *this;
        if (kind_ == Kind::generator)
            s.seed_ = seed;
        return s;
    }

  private:
    Kind kind_ = Kind::constant;
    int n_ = 0;
    std::vector<Graph> graphs_;
    Sampler sampler_;
    std::uint64_t seed_ = 0;
    std::string desc_;
};

/// Tick-by-tick view of a schedule that avoids copying stored graphs.
class ScheduleCursor {
  public:
    explicit ScheduleCursor(const GraphSchedule &s) : schedule_(&s) {}

    const Graph &at(std::int64_t t) {
        if (const Graph *g = schedule_->stored_at(t))
            return *g;
        if (t != cached_t_) {
            scratch_ = schedule_->graph_at(t);
            cached_t_ = t;
        }
        return scratch_;
    }

  private:
    const GraphSchedule *schedule_;
    Graph scratch_;
    std::int64_t cached_t_ = -1;
};

/// True iff the union over every window [t, t+B-1], t in [0, horizon-B], is connected.
/// Periodic schedules only need windows starting in one period.
inline bool check_periodic_connectivity(const GraphSchedule &s, int window, std::int64_t horizon) {
    if (window < 1)
        throw ParameterError("check_periodic_connectivity: window must be >= 1");
    if (horizon < window)
        throw ParameterError("check_periodic_connectivity: horizon must be >= window");
    if (s.kind() == GraphSchedule::Kind::constant)
        return is_connected(s.graph_at(0));
    std::int64_t last = horizon - window;
    if (s.kind() == GraphSchedule::Kind::periodic)
        last = std::min(last, s.period() - 1);
    for (std::int64_t t = 0; t <= last; ++t) {
        std::vector<Graph> w;
        w.reserve(static_cast<std::size_t>(window));
        for (int k = 0; k < window; ++k)
            w.push_back(s.graph_at(t + k));
        if (!is_connected(union_graph(w)))
            return false;
    }
    return true;
}

// Edge-list text format: first line n, then one "i j" per line.

inline void write_edge_list(std::ostream &os, const Graph &g) {
    os << g.n() << '\n';
    for (const auto &[a, b] : g.edges())
        os << a << ' ' << b << '\n';
}

inline Graph read_edge_list(std::istream &is) {
    std::string line;
    int n = -1;
    std::vector<Edge> e;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n) || n < 1)
                throw ConfigError("edge list: bad node count on line " + std::to_string(lineno));
            continue;
        }
        int a = 0, b = 0;
        if (!(ls >> a >> b))
            throw ConfigError("edge list: expected 'i j' on line " + std::to_string(lineno));
        e.emplace_back(a, b);
    }
    if (n < 0)
        throw ConfigError("edge list: missing node count");
    try {
        return Graph(n, std::move(e));
    } catch (const ParameterError &err) {
        throw ConfigError(std::string("edge list: ") + err.what());
    }
}

inline Graph load_edge_list(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open graph file '" + path + "'");
    return read_edge_list(in);
}

} // namespace qgossip
