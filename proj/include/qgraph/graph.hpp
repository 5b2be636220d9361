#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/errors.hpp"

namespace qgraph {

inline constexpr double pi = 3.14159265358979323846;

struct Edge {
    int u = 0;
    int v = 0;
    bool is_loop() const { return u == v; }
    int other(int w) const { return w == u ? v : u; }
};

/// Connected multigraph with loops. Edge e is stored as the bond pair
/// (e, e + E): bond e runs u -> v, bond e + E runs v -> u.
class DiscreteGraph {
public:
    DiscreteGraph() = default;

    DiscreteGraph(int vertex_count, std::vector<Edge> edges)
        : vertex_count_(vertex_count), edges_(std::move(edges)) {
        if (vertex_count_ < 1) throw StructuralError("graph needs at least one vertex");
        if (edges_.empty()) throw StructuralError("graph needs at least one edge");
        for (const Edge& e : edges_) {
            if (e.u < 0 || e.v < 0 || e.u >= vertex_count_ || e.v >= vertex_count_)
                throw StructuralError("edge endpoint out of range");
        }
        const int E = edge_count();
        out_.assign(vertex_count_, {});
        for (int b = 0; b < 2 * E; ++b) out_[origin(b)].push_back(b);
        std::vector<char> seen(vertex_count_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int w = stack.back();
            stack.pop_back();
            for (int b : out_[w]) {
                int t = terminus(b);
                if (!seen[t]) {
                    seen[t] = 1;
                    ++reached;
                    stack.push_back(t);
                }
            }
        }
        if (reached != vertex_count_) throw StructuralError("graph is not connected");
    }

    DiscreteGraph(int vertex_count, const std::vector<std::pair<int, int>>& edges)
        : DiscreteGraph(vertex_count, to_edges(edges)) {}

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int bond_count() const { return 2 * edge_count(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(e); }

    int bond_edge(int b) const { return b % edge_count(); }
    int reverse(int b) const { return (b + edge_count()) % bond_count(); }
    int origin(int b) const {
        return b < edge_count() ? edges_[b].u : edges_[b - edge_count()].v;
    }
    int terminus(int b) const { return origin(reverse(b)); }

    /// Bonds leaving v, ascending. A loop at v contributes both of its bonds.
    const std::vector<int>& bonds_from(int v) const { return out_.at(v); }
    int degree(int v) const { return static_cast<int>(out_.at(v).size()); }

    bool is_leaf(int v) const { return degree(v) == 1; }

    std::vector<int> leaves() const {
        std::vector<int> r;
        for (int v = 0; v < vertex_count_; ++v)
            if (is_leaf(v)) r.push_back(v);
        return r;
    }

    /// Edges with at least one endpoint of degree one.
    std::vector<int> leaf_edges() const {
        std::vector<int> r;
        for (int e = 0; e < edge_count(); ++e)
            if (is_leaf(edges_[e].u) || is_leaf(edges_[e].v)) r.push_back(e);
        return r;
    }

    /// Edge e = (v, w) with w a leaf, seen from v.
    bool is_dangling_at(int e, int v) const {
        const Edge& ed = edges_.at(e);
        if (ed.is_loop()) return false;
        if (ed.u != v && ed.v != v) return false;
        return is_leaf(ed.other(v)) && !is_leaf(v);
    }

    bool is_loop_at(int e, int v) const {
        const Edge& ed = edges_.at(e);
        return ed.is_loop() && ed.u == v;
    }

private:
    static std::vector<Edge> to_edges(const std::vector<std::pair<int, int>>& p) {
        std::vector<Edge> r;
        r.reserve(p.size());
        for (auto [a, b] : p) r.push_back({a, b});
        return r;
    }

    int vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_;
};

inline int betti(const DiscreteGraph& g) {
    return g.edge_count() - g.vertex_count() + 1;
}

inline bool is_tree(const DiscreteGraph& g) { return betti(g) == 0; }

/// Bridges by low-link search. Parallel edges are told apart by edge id.
inline std::vector<int> find_bridges(const DiscreteGraph& g) {
    const int V = g.vertex_count();
    std::vector<int> disc(V, -1), low(V, 0), bridges;
    int timer = 0;
    std::function<void(int, int)> dfs = [&](int v, int parent_edge) {
        disc[v] = low[v] = timer++;
        for (int b : g.bonds_from(v)) {
            int e = g.bond_edge(b);
            if (e == parent_edge) continue;
            int w = g.terminus(b);
            if (w == v) continue;
            if (disc[w] < 0) {
                dfs(w, e);
                low[v] = std::min(low[v], low[w]);
                if (low[w] > disc[v]) bridges.push_back(e);
            } else {
                low[v] = std::min(low[v], disc[w]);
            }
        }
    };
    dfs(0, -1);
    std::sort(bridges.begin(), bridges.end());
    bridges.erase(std::unique(bridges.begin(), bridges.end()), bridges.end());
    return bridges;
}

/// Nonnegative edge lengths with unit sum.
class LengthVector {
public:
    static constexpr double sum_tolerance = 1e-12;
    static constexpr double renormalize_tolerance = 1e-9;

    LengthVector() = default;

    explicit LengthVector(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw InvalidInputError("empty length vector");
        double s = 0;
        for (double x : values_) {
            if (!std::isfinite(x) || x < 0) throw InvalidInputError("lengths must be finite and nonnegative");
            s += x;
        }
        if (s == 0) throw DegenerateGraphError("all edge lengths are zero");
        if (std::abs(s - 1) > renormalize_tolerance)
            throw InvalidInputError("lengths must sum to 1 (got " + std::to_string(s) + ")");
        if (std::abs(s - 1) > sum_tolerance)
            for (double& x : values_) x /= s;
    }

    static LengthVector equilateral(int edge_count) {
        return LengthVector(std::vector<double>(edge_count, 1.0 / edge_count));
    }

    /// Divides by the sum; any positive input is accepted.
    static LengthVector normalized(std::vector<double> raw) {
        double s = 0;
        for (double x : raw) {
            if (!std::isfinite(x) || x < 0) throw InvalidInputError("lengths must be finite and nonnegative");
            s += x;
        }
        if (s == 0) throw DegenerateGraphError("all edge lengths are zero");
        for (double& x : raw) x /= s;
        return LengthVector(std::move(raw));
    }

    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_.at(i); }
    const std::vector<double>& values() const { return values_; }
    bool is_interior() const {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return x > 0; });
    }

    friend bool operator==(const LengthVector& a, const LengthVector& b) { return a.values_ == b.values_; }

private:
    std::vector<double> values_;
};

/// Neumann, Dirichlet or delta-type with parameter theta in (-pi, pi]:
/// cos(theta/2) * sum of outgoing derivatives = sin(theta/2) * f(v).
class VertexCondition {
public:
    enum class Kind { neumann, dirichlet, delta };

    static VertexCondition neumann() { return VertexCondition(Kind::neumann, 0.0); }
    static VertexCondition dirichlet() { return VertexCondition(Kind::dirichlet, pi); }
    static VertexCondition delta(double theta) {
        if (!(theta > -pi && theta <= pi)) throw InvalidInputError("theta must lie in (-pi, pi]");
        return VertexCondition(Kind::delta, theta);
    }

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    double cos_half() const { return theta_ == pi ? 0.0 : std::cos(theta_ / 2); }
    double sin_half() const { return theta_ == pi ? 1.0 : std::sin(theta_ / 2); }
    bool is_dirichlet() const { return cos_half() == 0.0; }
    bool is_neumann() const { return sin_half() == 0.0; }
    /// tan(theta/2); only meaningful when not Dirichlet.
    double alpha() const { return sin_half() / cos_half(); }

    friend bool operator==(const VertexCondition& a, const VertexCondition& b) {
        return a.kind_ == b.kind_ && a.theta_ == b.theta_;
    }

private:
    VertexCondition(Kind k, double t) : kind_(k), theta_(t) {}
    Kind kind_;
    double theta_;
};

using VertexConditionMap = std::vector<VertexCondition>;

/// Metric graph with strictly positive lengths. The total length is not
/// forced to one so that single edges can be perturbed; constructors from
/// a LengthVector produce unit total length.
class MetricGraph {
public:
    MetricGraph() = default;

    MetricGraph(DiscreteGraph g, std::vector<double> lengths, VertexConditionMap conditions = {})
        : graph_(std::move(g)), lengths_(std::move(lengths)), conditions_(std::move(conditions)) {
        if (static_cast<int>(lengths_.size()) != graph_.edge_count())
            throw InvalidInputError("length vector size does not match edge count");
        for (double x : lengths_)
            if (!(x > 0) || !std::isfinite(x)) throw InvalidInputError("metric graph lengths must be positive");
        if (conditions_.empty()) conditions_.assign(graph_.vertex_count(), VertexCondition::neumann());
        if (static_cast<int>(conditions_.size()) != graph_.vertex_count())
            throw InvalidInputError("condition map size does not match vertex count");
        source_edge_.resize(graph_.edge_count());
        std::iota(source_edge_.begin(), source_edge_.end(), 0);
        vertex_image_.resize(graph_.vertex_count());
        std::iota(vertex_image_.begin(), vertex_image_.end(), 0);
    }

    const DiscreteGraph& graph() const { return graph_; }
    const std::vector<double>& lengths() const { return lengths_; }
    double length(int e) const { return lengths_.at(e); }
    const VertexConditionMap& conditions() const { return conditions_; }
    const VertexCondition& condition(int v) const { return conditions_.at(v); }
    int edge_count() const { return graph_.edge_count(); }
    int vertex_count() const { return graph_.vertex_count(); }

    double total_length() const { return std::accumulate(lengths_.begin(), lengths_.end(), 0.0); }
    double max_length() const { return *std::max_element(lengths_.begin(), lengths_.end()); }
    double min_length() const { return *std::min_element(lengths_.begin(), lengths_.end()); }

    bool all_neumann() const {
        return std::all_of(conditions_.begin(), conditions_.end(),
                           [](const VertexCondition& c) { return c.is_neumann(); });
    }

    MetricGraph with_condition(int v, VertexCondition c) const {
        MetricGraph r = *this;
        r.conditions_.at(v) = c;
        return r;
    }

    MetricGraph with_lengths(std::vector<double> lengths) const {
        MetricGraph r(graph_, std::move(lengths), conditions_);
        r.source_edge_ = source_edge_;
        r.vertex_image_ = vertex_image_;
        return r;
    }

    /// For each stored edge, its id in the graph before contraction.
    const std::vector<int>& source_edge() const { return source_edge_; }
    /// For each vertex of the graph before contraction, its image here.
    const std::vector<int>& vertex_image() const { return vertex_image_; }

    void set_provenance(std::vector<int> source_edge, std::vector<int> vertex_image) {
        source_edge_ = std::move(source_edge);
        vertex_image_ = std::move(vertex_image);
    }

private:
    DiscreteGraph graph_;
    std::vector<double> lengths_;
    VertexConditionMap conditions_;
    std::vector<int> source_edge_;
    std::vector<int> vertex_image_;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent[a] = b;
    }
};

/// Condition of a vertex obtained by merging several: Dirichlet wins,
/// otherwise the delta coefficients add.
inline VertexCondition merge_conditions(const std::vector<VertexCondition>& cs) {
    double alpha = 0;
    bool any_delta = false;
    for (const auto& c : cs) {
        if (c.is_dirichlet()) return VertexCondition::dirichlet();
        if (!c.is_neumann()) {
            any_delta = true;
            alpha += c.alpha();
        }
    }
    if (!any_delta || alpha == 0) return VertexCondition::neumann();
    return VertexCondition::delta(2 * std::atan(alpha));
}

}  // namespace detail

/// Identifies the endpoints of every zero-length edge. Zero-length loops vanish.
inline MetricGraph contract_zero_edges(const DiscreteGraph& g, const LengthVector& l,
                                       const VertexConditionMap& conditions = {}) {
    const int E = g.edge_count();
    const int V = g.vertex_count();
    if (l.size() != E) throw InvalidInputError("length vector size does not match edge count");
    VertexConditionMap conds = conditions;
    if (conds.empty()) conds.assign(V, VertexCondition::neumann());
    if (static_cast<int>(conds.size()) != V) throw InvalidInputError("condition map size does not match vertex count");

    detail::UnionFind uf(V);
    for (int e = 0; e < E; ++e)
        if (l[e] == 0) uf.unite(g.edge(e).u, g.edge(e).v);

    std::vector<int> image(V, -1);
    int next = 0;
    for (int v = 0; v < V; ++v) {
        int r = uf.find(v);
        if (image[r] < 0) image[r] = next++;
        image[v] = image[r];
    }
    std::vector<std::vector<VertexCondition>> groups(next);
    for (int v = 0; v < V; ++v) groups[image[v]].push_back(conds[v]);
    VertexConditionMap merged;
    for (auto& grp : groups) merged.push_back(detail::merge_conditions(grp));

    std::vector<Edge> edges;
    std::vector<double> lengths;
    std::vector<int> source;
    for (int e = 0; e < E; ++e) {
        if (l[e] == 0) continue;
        edges.push_back({image[g.edge(e).u], image[g.edge(e).v]});
        lengths.push_back(l[e]);
        source.push_back(e);
    }
    if (edges.empty()) throw DegenerateGraphError("all edge lengths are zero");
    MetricGraph m(DiscreteGraph(next, std::move(edges)), std::move(lengths), std::move(merged));
    m.set_provenance(std::move(source), std::move(image));
    return m;
}

inline MetricGraph make_metric(const DiscreteGraph& g, const LengthVector& l,
                               const VertexConditionMap& conditions = {}) {
    return contract_zero_edges(g, l, conditions);
}

inline MetricGraph make_metric(const DiscreteGraph& g, const std::vector<double>& l,
                               const VertexConditionMap& conditions = {}) {
    return contract_zero_edges(g, LengthVector(l), conditions);
}

inline MetricGraph equilateral(const DiscreteGraph& g) {
    return contract_zero_edges(g, LengthVector::equilateral(g.edge_count()));
}

/// Largest distance between two leaves of a metric tree.
inline double tree_diameter(const MetricGraph& m) {
    const DiscreteGraph& g = m.graph();
    if (!is_tree(g)) throw UnsupportedTopologyError("diameter is only supported for trees");
    double best = 0;
    std::vector<double> dist(g.vertex_count());
    for (int s : g.leaves()) {
        std::fill(dist.begin(), dist.end(), -1.0);
        dist[s] = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int b : g.bonds_from(v)) {
                int w = g.terminus(b);
                if (dist[w] < 0) {
                    dist[w] = dist[v] + m.length(g.bond_edge(b));
                    stack.push_back(w);
                }
            }
        }
        for (int t : g.leaves()) best = std::max(best, dist[t]);
    }
    return best;
}

/// Result of merging the two edges at Neumann vertices of degree two.
struct SmoothedGraph {
    DiscreteGraph graph;
    /// Original edge ids forming each new edge, in order along the chain.
    std::vector<std::vector<int>> chains;
    /// Original vertex id of each new vertex.
    std::vector<int> kept_vertices;
};

inline SmoothedGraph smooth_degree_two(const DiscreteGraph& g, const VertexConditionMap& conditions = {}) {
    struct Chain {
        int a, b;
        std::vector<int> edges;
        bool alive = true;
    };
    std::vector<Chain> chains;
    for (int e = 0; e < g.edge_count(); ++e) chains.push_back({g.edge(e).u, g.edge(e).v, {e}});
    std::vector<char> alive(g.vertex_count(), 1);
    auto neumann = [&](int v) { return conditions.empty() || conditions[v].is_neumann(); };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < g.vertex_count() && !changed; ++v) {
            if (!alive[v] || !neumann(v)) continue;
            std::vector<int> at;
            int ends = 0;
            for (int c = 0; c < static_cast<int>(chains.size()); ++c) {
                if (!chains[c].alive) continue;
                int n = (chains[c].a == v) + (chains[c].b == v);
                if (n) at.push_back(c);
                ends += n;
            }
            if (ends != 2 || at.size() != 2) continue;
            Chain& c1 = chains[at[0]];
            Chain& c2 = chains[at[1]];
            if (c1.a == v) {
                std::swap(c1.a, c1.b);
                std::reverse(c1.edges.begin(), c1.edges.end());
            }
            if (c2.b == v) {
                std::swap(c2.a, c2.b);
                std::reverse(c2.edges.begin(), c2.edges.end());
            }
            c1.b = c2.b;
            c1.edges.insert(c1.edges.end(), c2.edges.begin(), c2.edges.end());
            c2.alive = false;
            alive[v] = 0;
            changed = true;
        }
    }
    std::vector<int> image(g.vertex_count(), -1);
    SmoothedGraph r;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (alive[v]) {
            image[v] = static_cast<int>(r.kept_vertices.size());
            r.kept_vertices.push_back(v);
        }
    std::vector<const Chain*> live;
    for (const auto& c : chains)
        if (c.alive) live.push_back(&c);
    std::sort(live.begin(), live.end(), [](const Chain* x, const Chain* y) {
        return *std::min_element(x->edges.begin(), x->edges.end()) <
               *std::min_element(y->edges.begin(), y->edges.end());
    });
    std::vector<Edge> edges;
    for (const Chain* c : live) {
        edges.push_back({image[c->a], image[c->b]});
        r.chains.push_back(c->edges);
    }
    r.graph = DiscreteGraph(static_cast<int>(r.kept_vertices.size()), std::move(edges));
    return r;
}

}  // namespace qgraph
