#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

/// Gap eigenpair, rejecting a degenerate k1.
inline Eigenpair simple_gap(const MetricGraph& m) {
    Eigenpair p = gap_eigenpair(m);
    if (p.multiplicity != 1)
        throw MultiplicityError("spectral gap has multiplicity " + std::to_string(p.multiplicity), p.multiplicity);
    return p;
}

/// f'^2 + k^2 f^2 on each edge; constant along the edge.
inline std::vector<double> energies_of(const TrigFunction& f) {
    std::vector<double> r(f.A.size());
    for (std::size_t e = 0; e < r.size(); ++e) r[e] = f.k * f.k * (f.A[e] * f.A[e] + f.B[e] * f.B[e]);
    return r;
}

struct EnergyVector {
    double k = 0;
    std::vector<double> values;
};

inline EnergyVector edge_energies(const MetricGraph& m) {
    Eigenpair p = simple_gap(m);
    return {p.k, energies_of(p.basis.at(0))};
}

/// Derivative of k1^2 with respect to the length of each edge.
inline std::vector<double> gap_gradient(const MetricGraph& m) {
    auto en = edge_energies(m).values;
    for (double& x : en) x = -x;
    return en;
}

struct CriticalityReport {
    bool critical = false;
    double k = 0;
    /// (max - min) / mean of the edge energies.
    double spread = 0;
    std::vector<double> energies;
    /// Odd-degree vertices with a nonzero derivative.
    std::vector<int> odd_vertex_violations;
    /// Even-degree vertices whose derivatives differ in absolute value.
    std::vector<int> even_vertex_violations;
    bool vertex_conditions_hold() const { return odd_vertex_violations.empty() && even_vertex_violations.empty(); }
};

inline CriticalityReport criticality_of(const MetricGraph& m, const TrigFunction& f, double tol) {
    CriticalityReport r;
    r.k = f.k;
    r.energies = energies_of(f);
    const auto [lo, hi] = std::minmax_element(r.energies.begin(), r.energies.end());
    const double mean = std::accumulate(r.energies.begin(), r.energies.end(), 0.0) / r.energies.size();
    r.spread = (*hi - *lo) / mean;
    r.critical = r.spread <= tol;
    const double scale = std::sqrt(mean);
    const DiscreteGraph& g = m.graph();
    for (int v = 0; v < g.vertex_count(); ++v) {
        std::vector<double> d;
        for (int b : g.bonds_from(v)) d.push_back(std::abs(bond_derivative(m, f, b)));
        const auto [dlo, dhi] = std::minmax_element(d.begin(), d.end());
        if (g.degree(v) % 2 == 1) {
            if (*dhi > tol * scale) r.odd_vertex_violations.push_back(v);
        } else if (*dhi - *dlo > tol * scale) {
            r.even_vertex_violations.push_back(v);
        }
    }
    return r;
}

inline CriticalityReport is_critical(const MetricGraph& m, double tol = 1e-6) {
    return criticality_of(m, simple_gap(m).basis.at(0), tol);
}

struct PathPiece {
    std::vector<int> edges;     // in walk order
    std::vector<int> vertices;  // walk vertices, edges.size() + 1 entries
    bool closed = false;        // Eulerian cycle rather than path
    double length = 0;
    double zeros = 0;           // vertex zeros weighted by half their degree in the piece
};

struct PathDecomposition {
    double k = 0;
    std::vector<PathPiece> pieces;
    double mu = 0;
};

namespace detail {

inline double piece_zeros(const MetricGraph& m, const TrigFunction& f, const PathPiece& p, double sup) {
    const DiscreteGraph& g = m.graph();
    double z = 0;
    std::vector<int> deg(g.vertex_count(), 0);
    for (int e : p.edges) {
        ++deg[g.edge(e).u];
        ++deg[g.edge(e).v];
        z += static_cast<double>(edge_zeros(m, f, e, 1e-8).size());
    }
    for (int v = 0; v < g.vertex_count(); ++v)
        if (deg[v] > 0 && std::abs(vertex_value(m, f, v)) <= 1e-8 * sup) z += deg[v] / 2.0;
    return z;
}

}  // namespace detail

/// Edge-disjoint Eulerian pieces along which the gap eigenfunction is a
/// Neumann cosine: paths between odd vertices first, then cycles.
inline PathDecomposition path_decomposition(const MetricGraph& m, double tol = 1e-6) {
    Eigenpair p = simple_gap(m);
    const TrigFunction& f = p.basis.at(0);
    if (!criticality_of(m, f, tol).critical) throw PreconditionError("graph is not at a critical point");
    const DiscreteGraph& g = m.graph();
    const int E = g.edge_count();
    std::vector<char> used(E, 0);
    const auto energies = energies_of(f);
    const double scale = std::sqrt(std::accumulate(energies.begin(), energies.end(), 0.0) / E);
    const double sup = sup_norm(m, f);

    auto next_bond = [&](int w, double arrival) {
        int best = -1;
        double best_err = 0;
        for (int b : g.bonds_from(w)) {
            if (used[g.bond_edge(b)]) continue;
            const double err = std::abs(bond_derivative(m, f, b) + arrival);
            const bool better = best < 0 || (err <= tol * scale ? best_err > tol * scale || g.bond_edge(b) < g.bond_edge(best)
                                                                  : err < best_err && best_err > tol * scale);
            if (better) {
                best = b;
                best_err = err;
            }
        }
        return best;
    };

    auto walk = [&](int start_bond, bool stop_at_odd) {
        PathPiece piece;
        const int v0 = g.origin(start_bond);
        const double d0 = bond_derivative(m, f, start_bond);
        piece.vertices.push_back(v0);
        int b = start_bond;
        while (true) {
            const int e = g.bond_edge(b);
            used[e] = 1;
            piece.edges.push_back(e);
            piece.length += m.length(e);
            const int w = g.terminus(b);
            piece.vertices.push_back(w);
            const double arrival = bond_derivative(m, f, g.reverse(b));
            if (stop_at_odd && g.degree(w) % 2 == 1) break;
            if (!stop_at_odd && w == v0 && std::abs(arrival + d0) <= tol * scale) {
                piece.closed = true;
                break;
            }
            const int nb = next_bond(w, arrival);
            if (nb < 0) {
                piece.closed = w == v0;
                break;
            }
            b = nb;
        }
        return piece;
    };

    PathDecomposition r;
    r.k = p.k;
    auto lowest_unused_bond = [&](int v) {
        for (int b : g.bonds_from(v))
            if (!used[g.bond_edge(b)]) return b;
        return -1;
    };
    for (bool progress = true; progress;) {
        progress = false;
        for (int v = 0; v < g.vertex_count(); ++v) {
            if (g.degree(v) % 2 == 0) continue;
            int b = lowest_unused_bond(v);
            if (b < 0) continue;
            r.pieces.push_back(walk(b, true));
            progress = true;
            break;
        }
    }
    for (int e = 0; e < E; ++e) {
        if (used[e]) continue;
        r.pieces.push_back(walk(e, false));
    }
    for (auto& piece : r.pieces) {
        piece.zeros = detail::piece_zeros(m, f, piece, sup);
        r.mu += piece.zeros;
    }
    return r;
}

/// Number of connected components of {f != 0} for the gap eigenfunction.
inline int nodal_count(const MetricGraph& m, const TrigFunction& f) {
    const DiscreteGraph& g = m.graph();
    const double sup = sup_norm(m, f);
    struct Piece {
        int edge;
        int sign;
    };
    std::vector<Piece> pieces;
    std::vector<int> first(g.edge_count()), last(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        auto z = edge_zeros(m, f, e, 1e-8 * m.length(e));
        std::vector<double> cuts{0.0};
        cuts.insert(cuts.end(), z.begin(), z.end());
        cuts.push_back(m.length(e));
        first[e] = static_cast<int>(pieces.size());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double val = f.value(e, 0.5 * (cuts[i] + cuts[i + 1]));
            pieces.push_back({e, std::abs(val) <= 1e-12 * sup ? 0 : (val > 0 ? 1 : -1)});
        }
        last[e] = static_cast<int>(pieces.size()) - 1;
    }
    detail::UnionFind uf(static_cast<int>(pieces.size()));
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (std::abs(vertex_value(m, f, v)) <= 1e-8 * sup) continue;
        int anchor = -1;
        for (int b : g.bonds_from(v)) {
            const int e = g.bond_edge(b);
            const int piece = b < g.edge_count() ? first[e] : last[e];
            if (anchor < 0) anchor = piece;
            else uf.unite(anchor, piece);
        }
    }
    std::vector<char> root(pieces.size(), 0);
    int count = 0;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
        if (pieces[i].sign == 0) continue;
        int r = uf.find(i);
        if (!root[r]) {
            root[r] = 1;
            ++count;
        }
    }
    return count;
}

inline int nodal_count(const MetricGraph& m) { return nodal_count(m, simple_gap(m).basis.at(0)); }

}  // namespace qgraph
