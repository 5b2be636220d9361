#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qgraph/families.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/perturbation.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

// Catalog of closed-form gaps.

enum class Family { star, flower, stower, mandarin, necklace, standarin, small_stower };

struct CatalogEntry {
    Family family = Family::star;
    int a = 0, b = 0, c = 0;  // family parameters

    static CatalogEntry star(int E) { return {Family::star, E}; }
    static CatalogEntry flower(int E) { return {Family::flower, E}; }
    static CatalogEntry stower(int petals, int leaves) { return {Family::stower, petals, leaves}; }
    static CatalogEntry mandarin(int E) { return {Family::mandarin, E}; }
    static CatalogEntry necklace(int beads) { return {Family::necklace, beads}; }
    static CatalogEntry standarin(int n, int M, int S) { return {Family::standarin, n, M, S}; }
    static CatalogEntry small_stower(int petals, int leaves) { return {Family::small_stower, petals, leaves}; }

    std::string name() const {
        auto s = [](int x) { return std::to_string(x); };
        switch (family) {
            case Family::star: return "star(" + s(a) + ")";
            case Family::flower: return "flower(" + s(a) + ")";
            case Family::stower: return "stower(" + s(a) + "," + s(b) + ")";
            case Family::mandarin: return "mandarin(" + s(a) + ")";
            case Family::necklace: return "necklace(" + s(a) + ")";
            case Family::standarin: return "standarin(" + s(a) + "," + s(b) + "," + s(c) + ")";
            default: return "small_stower(" + s(a) + "," + s(b) + ")";
        }
    }

    void validate() const {
        auto bad = [&](const char* why) { throw InvalidInputError(name() + ": " + why); };
        switch (family) {
            case Family::star:
            case Family::mandarin:
            case Family::necklace:
                if (a < 1) bad("needs at least one edge");
                break;
            case Family::flower:
                if (a < 2) bad("a single petal is the circle; use small_stower(1,0)");
                break;
            case Family::stower:
                if (a < 1 || b < 1) bad("needs petals and leaves");
                if (a == 1 && b == 1) bad("no equilateral maximizer; the supremizer is the unit circle");
                break;
            case Family::standarin:
                if (a < 2 || b < 0 || c < 0 || c > 2 || b + c < 2) bad("needs n >= 2 and M + S >= 2");
                if (b == 0 && c != 2) bad("a star-only chain needs S = 2");
                break;
            case Family::small_stower: {
                const bool known = (a == 1 && (b == 0 || b == 1 || b == 2 || b == 3)) || (b == 1 && (a == 2 || a == 3));
                if (!known) bad("not a small stower");
                break;
            }
        }
    }

    DiscreteGraph graph() const {
        validate();
        switch (family) {
            case Family::star: return families::star(a);
            case Family::flower: return families::flower(a);
            case Family::stower:
            case Family::small_stower: return families::stower(a, b);
            case Family::mandarin: return families::mandarin(a);
            case Family::necklace: return families::necklace(a);
            default: return families::standarin(a, b, c);
        }
    }

    /// Lengths realizing the closed-form gap; zeros mark contracted edges.
    std::vector<double> lengths() const {
        validate();
        switch (family) {
            case Family::stower: return families::stower_lengths(a, b);
            case Family::small_stower:
                if (a == 1 && b == 1) return {1.0, 0.0};
                return families::stower_lengths(a, b);
            case Family::standarin:
                return families::standarin_lengths(a, b, c, b == 0 ? 1.0 / (2 * a) : c > 0 ? 1.0 / (4 * a) : 0.0);
            default: return LengthVector::equilateral(graph().edge_count()).values();
        }
    }
};

inline double catalog_gap(const CatalogEntry& entry) {
    entry.validate();
    const int a = entry.a, b = entry.b;
    switch (entry.family) {
        case Family::star: return pi * a / 2;
        case Family::flower: return pi * a;
        case Family::stower: return pi * (2 * a + b) / 2;
        case Family::mandarin: return pi * a;
        case Family::necklace: return 2 * pi;
        case Family::standarin: return pi * a;
        default:
            if (a == 1 && b <= 1) return 2 * pi;
            return pi * (2 * a + b) / 2;
    }
}

inline std::vector<CatalogEntry> default_catalog() {
    std::vector<CatalogEntry> r;
    for (int E = 2; E <= 5; ++E) r.push_back(CatalogEntry::star(E));
    for (int E = 2; E <= 4; ++E) r.push_back(CatalogEntry::flower(E));
    for (auto [p, l] : std::vector<std::pair<int, int>>{{3, 2}, {2, 2}, {1, 3}, {2, 1}, {3, 1}})
        r.push_back(CatalogEntry::stower(p, l));
    for (int E = 2; E <= 4; ++E) r.push_back(CatalogEntry::mandarin(E));
    for (int n = 1; n <= 3; ++n) r.push_back(CatalogEntry::necklace(n));
    for (auto [M, S] : std::vector<std::pair<int, int>>{{1, 1}, {2, 0}, {1, 2}, {3, 0}, {2, 1}, {0, 2}})
        r.push_back(CatalogEntry::standarin(2, M, S));
    for (auto [p, l] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 1}, {3, 1}})
        r.push_back(CatalogEntry::small_stower(p, l));
    return r;
}

// Bounds.

/// pi (E - E_l / 2), with E_l the number of edges ending at a leaf.
inline double upper_bound(const DiscreteGraph& g) {
    const int E = g.edge_count();
    const int El = static_cast<int>(g.leaf_edges().size());
    if ((E == 1 && El <= 1) || (E == 2 && El == 1))
        throw NotApplicableError("bound does not apply to (E, E_l) = (" + std::to_string(E) + ", " + std::to_string(El) + ")");
    return pi * (E - El / 2.0);
}

// Symmetrization.

/// Replaces the lengths of a group of dangling edges at v, or of loops at v,
/// by their mean.
inline std::vector<double> symmetrize(const MetricGraph& m, int v, const std::vector<int>& group) {
    const DiscreteGraph& g = m.graph();
    if (v < 0 || v >= g.vertex_count()) throw InvalidGroupError("vertex out of range");
    if (group.empty()) throw InvalidGroupError("empty group");
    std::vector<int> sorted = group;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidGroupError("repeated edge in group");
    for (int e : group)
        if (e < 0 || e >= g.edge_count()) throw InvalidGroupError("edge out of range");
    const bool dangling = std::all_of(group.begin(), group.end(), [&](int e) { return g.is_dangling_at(e, v); });
    const bool loops = std::all_of(group.begin(), group.end(), [&](int e) { return g.is_loop_at(e, v); });
    if (!dangling && !loops) throw InvalidGroupError("group must consist of dangling edges or of loops at the vertex");
    std::vector<double> l = m.lengths();
    double mean = 0;
    for (int e : group) mean += l[e];
    mean /= static_cast<double>(group.size());
    for (int e : group) l[e] = mean;
    return l;
}

/// Maximal groups of dangling edges and of loops at each vertex.
inline std::vector<std::pair<int, std::vector<int>>> symmetrization_groups(const DiscreteGraph& g) {
    std::vector<std::pair<int, std::vector<int>>> r;
    for (int v = 0; v < g.vertex_count(); ++v) {
        std::vector<int> dangling, loops;
        for (int e = 0; e < g.edge_count(); ++e) {
            if (g.is_dangling_at(e, v)) dangling.push_back(e);
            if (g.is_loop_at(e, v)) loops.push_back(e);
        }
        if (dangling.size() >= 2) r.push_back({v, dangling});
        if (loops.size() >= 2) r.push_back({v, loops});
    }
    return r;
}

// Optimization.

struct TraceEntry {
    int iteration = 0;
    double gap = 0;
    double step = 0;
    std::string move;  // init, symmetrize, gradient, bundle, contract, restart
};

struct OptimizationResult {
    std::vector<double> lengths;  // on the input graph; zeros are contracted edges
    double gap = 0;
    int multiplicity = 0;
    std::string classification;  // maximizer-candidate, supremizer-candidate, infimizer, grid-optimum
    std::vector<TraceEntry> trace;
};

inline std::string boundary_class(const std::vector<double>& l) {
    return std::any_of(l.begin(), l.end(), [](double x) { return x == 0; }) ? "supremizer-candidate"
                                                                              : "maximizer-candidate";
}

struct OptimizeOptions {
    std::uint64_t seed = 1;
    int max_iterations = 400;
    int restarts = 10;
    double l_min = 1e-4;
    int pin_iterations = 5;
};

namespace detail {

/// Euclidean projection onto {sum x_i = 1, x_i >= lo} over the active coordinates.
inline void project_simplex(std::vector<double>& x, const std::vector<char>& active, double lo) {
    std::vector<double> y;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (active[i]) y.push_back(x[i] - lo);
    const double target = 1 - lo * static_cast<double>(y.size());
    std::vector<double> s = y;
    std::sort(s.begin(), s.end(), std::greater<double>());
    double cum = 0, tau = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        cum += s[j];
        const double t = (cum - target) / static_cast<double>(j + 1);
        if (s[j] - t > 0) tau = t;
    }
    for (std::size_t i = 0, j = 0; i < x.size(); ++i) {
        if (!active[i]) {
            x[i] = 0;
            continue;
        }
        x[i] = std::max(y[j++] - tau, 0.0) + lo;
    }
}

/// Maximizer of min_i (phi_i + g_i . d) - |d|^2 / (2 eta), found through its
/// dual over convex weights w: minimize eta/2 |sum w_i g_i|^2 + sum w_i phi_i.
inline std::vector<double> bundle_direction(const std::vector<std::vector<double>>& g, const std::vector<double>& phi,
                                            double eta) {
    const std::size_t n = g.size(), dim = g.at(0).size();
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };
    std::vector<double> w(n, 0.0);
    w[std::min_element(phi.begin(), phi.end()) - phi.begin()] = 1;
    std::vector<double> z(dim, 0.0);
    auto combine = [&] {
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < dim; ++k) z[k] += w[i] * g[i][k];
    };
    combine();
    for (int it = 0; it < 2000; ++it) {
        // Partial derivatives of the dual objective.
        std::size_t best = 0;
        std::vector<double> grad(n);
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = eta * dot(g[i], z) + phi[i];
            if (grad[i] < grad[best]) best = i;
        }
        double gap = 0;
        for (std::size_t i = 0; i < n; ++i) gap += w[i] * grad[i];
        gap -= grad[best];
        if (gap <= 1e-16 * (1 + std::abs(grad[best]))) break;
        std::vector<double> dz(dim);
        for (std::size_t k = 0; k < dim; ++k) dz[k] = g[best][k] - z[k];
        const double curv = eta * dot(dz, dz);
        const double t = curv > 0 ? std::clamp(gap / curv, 0.0, 1.0) : 1.0;
        for (auto& x : w) x *= 1 - t;
        w[best] += t;
        combine();
    }
    for (double& x : z) x *= eta;
    return z;
}

/// Gap search on a fixed topology with lengths x; entries of x that are zero
/// stay contracted.
class Ascent {
public:
    Ascent(const DiscreteGraph& g, const OptimizeOptions& opt) : g_(g), opt_(opt) {}

    MetricGraph metric(const std::vector<double>& x) const { return contract_zero_edges(g_, LengthVector::normalized(x)); }

    double gap(const std::vector<double>& x) const { return spectral_gap(metric(x)); }

    struct State {
        std::vector<double> x;
        double gap = 0;
        std::vector<TraceEntry> trace;
    };

    State run(std::vector<double> x, int iteration0 = 0) const {
        State s;
        const int E = g_.edge_count();
        std::vector<char> active(E);
        for (int e = 0; e < E; ++e) active[e] = x[e] > 0;
        s.x = x;
        s.gap = gap(x);
        s.trace.push_back({iteration0, s.gap, 0, "init"});
        std::vector<int> pinned(E, 0);
        std::vector<char> keep(E, 0);  // contraction was tried and rejected
        int stalls = 0;
        for (int it = 1; it <= opt_.max_iterations && stalls < 3; ++it) {
            const double before = s.gap;
            if (!try_symmetrize(s, iteration0 + it)) try_gradient(s, active, iteration0 + it);
            for (int e = 0; e < E; ++e) {
                pinned[e] = active[e] && !keep[e] && s.x[e] <= opt_.l_min * (1 + 1e-9) ? pinned[e] + 1 : 0;
                if (pinned[e] < opt_.pin_iterations) continue;
                if (std::count(active.begin(), active.end(), 1) <= 1) break;
                std::vector<double> y = s.x;
                y[e] = 0;
                const double sum = std::accumulate(y.begin(), y.end(), 0.0);
                for (double& t : y) t /= sum;
                const double gy = gap(y);
                if (gy >= s.gap) {
                    s.x = y;
                    s.gap = gy;
                    active[e] = 0;
                    s.trace.push_back({iteration0 + it, gy, opt_.l_min, "contract"});
                } else {
                    keep[e] = 1;
                }
                pinned[e] = 0;
            }
            const bool pending = std::any_of(pinned.begin(), pinned.end(), [](int c) { return c > 0; });
            stalls = s.gap - before <= 1e-13 * std::max(1.0, s.gap) && !pending ? stalls + 1 : 0;
        }
        return s;
    }

private:
    bool try_symmetrize(State& s, int it) const {
        MetricGraph m = metric(s.x);
        bool moved = false;
        for (const auto& [v, grp] : symmetrization_groups(m.graph())) {
            double lo = 1e300, hi = 0;
            for (int e : grp) {
                lo = std::min(lo, m.length(e));
                hi = std::max(hi, m.length(e));
            }
            if (hi - lo <= 1e-13) continue;
            auto l = symmetrize(m, v, grp);
            std::vector<double> y(s.x.size(), 0.0);
            for (int e = 0; e < m.edge_count(); ++e) y[m.source_edge()[e]] = l[e];
            const double gy = gap(y);
            if (gy > s.gap) {
                s.x = y;
                s.gap = gy;
                s.trace.push_back({it, gy, hi - lo, "symmetrize"});
                m = metric(s.x);
                moved = true;
            }
        }
        return moved;
    }

    struct Linearization {
        std::vector<std::vector<double>> grads;  // of k^2, tangent to the simplex
        std::vector<double> values;              // k^2 minus k1^2
    };

    /// Gradients of k^2 on the input edges, one per eigenfunction of the
    /// eigenvalues within a relative window above k1.
    Linearization cluster(const MetricGraph& m, const std::vector<char>& active, double k1) const {
        Spectrum sp = eigenvalues(m, k1 * (1 + 1e-2), true);
        Linearization r;
        for (const auto& p : sp.pairs) {
            if (p.k <= 0) continue;
            for (const auto& f : p.basis) {
                auto en = energies_of(f);
                std::vector<double> grad(g_.edge_count(), 0.0);
                for (int e = 0; e < m.edge_count(); ++e) grad[m.source_edge()[e]] = -en[e];
                double mean = 0;
                int n = 0;
                for (int e = 0; e < g_.edge_count(); ++e)
                    if (active[e]) {
                        mean += grad[e];
                        ++n;
                    }
                mean /= n;
                for (int e = 0; e < g_.edge_count(); ++e) grad[e] = active[e] ? grad[e] - mean : 0.0;
                r.grads.push_back(grad);
                r.values.push_back(p.k * p.k - k1 * k1);
            }
        }
        return r;
    }

    void try_gradient(State& s, const std::vector<char>& active, int it) const {
        MetricGraph m = metric(s.x);
        auto lin = cluster(m, active, s.gap);
        if (lin.grads.empty()) return;
        const bool bundle = lin.grads.size() > 1;
        const auto& g0 = lin.grads[0];
        const double norm = std::sqrt(std::inner_product(g0.begin(), g0.end(), g0.begin(), 0.0));
        if (!(norm > 1e-12 * s.gap * s.gap)) return;
        for (double eta = 0.1 / norm; eta * norm > 1e-14; eta /= 2) {
            std::vector<double> d = bundle ? bundle_direction(lin.grads, lin.values, eta) : g0;
            const double scale = bundle ? 1.0 : eta;
            std::vector<double> y = s.x;
            for (std::size_t e = 0; e < y.size(); ++e) y[e] += scale * d[e];
            project_simplex(y, active, opt_.l_min);
            const double gy = gap(y);
            if (gy > s.gap) {
                s.x = y;
                s.gap = gy;
                s.trace.push_back({it, gy, eta * norm, bundle ? "bundle" : "gradient"});
                return;
            }
        }
    }

    DiscreteGraph g_;
    OptimizeOptions opt_;
};

}  // namespace detail

/// Spectral gap ascent from init. Runs on the graph with degree-two vertices
/// smoothed away; chain lengths are split back in proportion to init.
inline OptimizationResult maximize_gap(const DiscreteGraph& g, const LengthVector& init,
                                       const OptimizeOptions& opt = {}) {
    if (init.size() != g.edge_count()) throw InvalidInputError("length vector size does not match edge count");
    SmoothedGraph sm = smooth_degree_two(g);
    const int H = sm.graph.edge_count();
    std::vector<double> x0(H, 0.0);
    for (int h = 0; h < H; ++h)
        for (int e : sm.chains[h]) x0[h] += init[e];
    detail::Ascent ascent(sm.graph, opt);
    auto best = ascent.run(x0);

    std::vector<detail::Ascent::State> starts(std::max(0, opt.restarts - 1));
    parallel_for(static_cast<int>(starts.size()), [&](int i) {
        std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(i));
        auto r = families::random_lengths(rng, H);
        std::vector<double> y = best.x;
        for (int h = 0; h < H; ++h)
            if (y[h] > 0) y[h] = 0.7 * y[h] + 0.3 * r[h];
        const double sum = std::accumulate(y.begin(), y.end(), 0.0);
        for (double& t : y) t /= sum;
        starts[i] = ascent.run(y);
    });
    for (const auto& s : starts) {
        if (s.gap > best.gap) {
            const int it = best.trace.back().iteration + 1;
            best.x = s.x;
            best.gap = s.gap;
            best.trace.push_back({it, s.gap, 0, "restart"});
        }
    }

    OptimizationResult r;
    r.lengths.assign(g.edge_count(), 0.0);
    for (int h = 0; h < H; ++h) {
        double chain = 0;
        for (int e : sm.chains[h]) chain += init[e];
        for (int e : sm.chains[h])
            r.lengths[e] = chain > 0 ? best.x[h] * init[e] / chain : best.x[h] / static_cast<double>(sm.chains[h].size());
    }
    const double total = std::accumulate(r.lengths.begin(), r.lengths.end(), 0.0);
    for (double& t : r.lengths) t /= total;
    Eigenpair p = first_positive_eigenvalue(contract_zero_edges(g, LengthVector(r.lengths)));
    r.gap = p.k;
    r.multiplicity = p.multiplicity;
    r.classification = boundary_class(r.lengths);
    r.trace = std::move(best.trace);
    return r;
}

/// Length vector attaining the infimum of the gap: all length on one bridge
/// (an interval, gap pi) or, without bridges, on one edge (a circle, gap 2 pi).
inline OptimizationResult infimize_gap(const DiscreteGraph& g) {
    auto bridges = find_bridges(g);
    const int e = bridges.empty() ? 0 : *std::min_element(bridges.begin(), bridges.end());
    OptimizationResult r;
    r.lengths.assign(g.edge_count(), 0.0);
    r.lengths[e] = 1;
    Eigenpair p = first_positive_eigenvalue(contract_zero_edges(g, LengthVector(r.lengths)));
    r.gap = p.k;
    r.multiplicity = p.multiplicity;
    r.classification = "infimizer";
    r.trace.push_back({0, r.gap, 0, "init"});
    return r;
}

enum class BruteMode { max, min };

/// Exhaustive scan of the simplex grid with spacing 1 / resolution.
inline OptimizationResult brute_force_gap(const DiscreteGraph& g, int resolution, BruteMode mode) {
    const int E = g.edge_count();
    if (E > 5 || resolution > 40) throw ResourceError("brute force is limited to E <= 5 and resolution <= 40");
    if (resolution < 1) throw InvalidInputError("resolution must be positive");
    std::vector<std::vector<int>> points;
    std::vector<int> c(E, 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == E - 1) {
            c[i] = left;
            points.push_back(c);
            return;
        }
        for (int t = 0; t <= left; ++t) {
            c[i] = t;
            self(self, i + 1, left - t);
        }
    };
    rec(rec, 0, resolution);
    std::vector<double> gaps(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int i) {
        std::vector<double> l(E);
        for (int e = 0; e < E; ++e) l[e] = static_cast<double>(points[i][e]) / resolution;
        gaps[i] = spectral_gap(contract_zero_edges(g, LengthVector(l)));
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < gaps.size(); ++i)
        if (mode == BruteMode::max ? gaps[i] > gaps[best] : gaps[i] < gaps[best]) best = i;
    OptimizationResult r;
    for (int e = 0; e < E; ++e) r.lengths.push_back(static_cast<double>(points[best][e]) / resolution);
    Eigenpair p = first_positive_eigenvalue(contract_zero_edges(g, LengthVector(r.lengths)));
    r.gap = p.k;
    r.multiplicity = p.multiplicity;
    r.classification = "grid-optimum";
    r.trace.push_back({0, r.gap, 0, "init"});
    return r;
}

}  // namespace qgraph
