#pragma once

#include <random>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph::families {

/// Center 0, leaves 1..E.
inline DiscreteGraph star(int E) {
    if (E < 1) throw InvalidInputError("star needs at least one edge");
    std::vector<Edge> edges;
    for (int i = 1; i <= E; ++i) edges.push_back({0, i});
    return DiscreteGraph(E + 1, edges);
}

/// E loops at a single vertex.
inline DiscreteGraph flower(int E) {
    if (E < 1) throw InvalidInputError("flower needs at least one petal");
    return DiscreteGraph(1, std::vector<Edge>(E, Edge{0, 0}));
}

/// Petals first (edges 0..Ep-1), then leaves.
inline DiscreteGraph stower(int petals, int leaves) {
    if (petals < 0 || leaves < 0 || petals + leaves < 1) throw InvalidInputError("bad stower parameters");
    std::vector<Edge> edges(petals, Edge{0, 0});
    for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
    return DiscreteGraph(leaves + 1, edges);
}

/// Lengths 2/(2Ep+El) on petals and 1/(2Ep+El) on leaves.
inline std::vector<double> stower_lengths(int petals, int leaves) {
    double n = 2.0 * petals + leaves;
    std::vector<double> l(petals, 2 / n);
    l.insert(l.end(), leaves, 1 / n);
    return l;
}

inline DiscreteGraph mandarin(int E) {
    if (E < 1) throw InvalidInputError("mandarin needs at least one edge");
    return DiscreteGraph(2, std::vector<Edge>(E, Edge{0, 1}));
}

/// Chain of beads 0..beads; bead i is a pair of parallel edges (i, i+1).
inline DiscreteGraph necklace(int beads) {
    if (beads < 1) throw InvalidInputError("necklace needs at least one bead");
    std::vector<Edge> edges;
    for (int i = 0; i < beads; ++i) {
        edges.push_back({i, i + 1});
        edges.push_back({i, i + 1});
    }
    return DiscreteGraph(beads + 1, edges);
}

inline DiscreteGraph path(int E) {
    std::vector<Edge> edges;
    for (int i = 0; i < E; ++i) edges.push_back({i, i + 1});
    return DiscreteGraph(E + 1, edges);
}

inline DiscreteGraph cycle(int E) {
    if (E == 1) return flower(1);
    std::vector<Edge> edges;
    for (int i = 0; i < E; ++i) edges.push_back({i, (i + 1) % E});
    return DiscreteGraph(E, edges);
}

/// Loop at 0 (edge 0), bridge 0-1 (edge 1), loop at 1 (edge 2).
inline DiscreteGraph dumbbell() { return DiscreteGraph(2, std::vector<Edge>{{0, 0}, {0, 1}, {1, 1}}); }

/// Spine 0-1-...-spine_edges, plus one extra leaf at each listed spine vertex.
inline DiscreteGraph caterpillar(int spine_edges, const std::vector<int>& leaf_at) {
    std::vector<Edge> edges;
    for (int i = 0; i < spine_edges; ++i) edges.push_back({i, i + 1});
    int next = spine_edges + 1;
    for (int v : leaf_at) edges.push_back({v, next++});
    return DiscreteGraph(next, edges);
}

/// M serial n-mandarins on chain vertices 0..M, with an n-star glued at
/// vertex 0 when S >= 1 and at vertex M when S == 2. Mandarin edges come
/// first, grouped by mandarin, then the leaves of the first and last star.
inline DiscreteGraph standarin(int n, int M, int S) {
    if (n < 1 || M < 0 || S < 0 || S > 2 || M + S < 1) throw InvalidInputError("bad standarin parameters");
    std::vector<Edge> edges;
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < n; ++i) edges.push_back({j, j + 1});
    int next = M + 1;
    for (int s = 0; s < S; ++s) {
        int hub = s == 0 ? 0 : M;
        for (int i = 0; i < n; ++i) edges.push_back({hub, next++});
    }
    return DiscreteGraph(next, edges);
}

/// Leaves of length `leaf`, mandarin j edges proportional to weights[j],
/// total n * (S * leaf + sum of mandarin edge lengths) = 1.
inline std::vector<double> standarin_lengths(int n, int M, int S, double leaf,
                                             std::vector<double> weights = {}) {
    if (weights.empty()) weights.assign(M, 1.0);
    double rest = 1.0 / n - S * leaf;
    if (M > 0 && !(rest > 0)) throw InvalidInputError("leaf length too large for standarin");
    if (M == 0 && std::abs(rest) > 1e-12) throw InvalidInputError("star-only standarin needs leaf = 1/(2n)");
    double wsum = 0;
    for (double w : weights) wsum += w;
    std::vector<double> l;
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < n; ++i) l.push_back(rest * weights[j] / wsum);
    for (int s = 0; s < S; ++s)
        for (int i = 0; i < n; ++i) l.push_back(leaf);
    return l;
}

/// Random connected multigraph: a random tree on V vertices plus extra
/// edges with uniformly chosen endpoints (loops and parallel edges allowed).
template <class Rng>
DiscreteGraph random_graph(Rng& rng, int V, int E) {
    if (V < 1 || E < V - 1 || E < 1) throw InvalidInputError("bad random graph size");
    std::vector<Edge> edges;
    for (int v = 1; v < V; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        edges.push_back({pick(rng), v});
    }
    std::uniform_int_distribution<int> any(0, V - 1);
    while (static_cast<int>(edges.size()) < E) edges.push_back({any(rng), any(rng)});
    std::shuffle(edges.begin(), edges.end(), rng);
    return DiscreteGraph(V, edges);
}

template <class Rng>
DiscreteGraph random_tree(Rng& rng, int V) {
    return random_graph(rng, V, V - 1);
}

/// Random point of the simplex, each coordinate at least floor.
template <class Rng>
std::vector<double> random_lengths(Rng& rng, int E, double floor = 0.0) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> l(E);
    double s = 0;
    for (double& x : l) s += (x = ex(rng));
    for (double& x : l) x = floor + (1 - E * floor) * x / s;
    s = 0;
    for (double x : l) s += x;
    for (double& x : l) x /= s;
    return l;
}

}  // namespace qgraph::families
