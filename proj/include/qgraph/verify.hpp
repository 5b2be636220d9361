#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qgraph/dispersion.hpp"
#include "qgraph/families.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/io.hpp"
#include "qgraph/optimize.hpp"
#include "qgraph/perturbation.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph::verify {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = true;
    std::string detail;
};

namespace detail {

using Rng = std::mt19937_64;

/// Collects the first failure and the worst value of a monitored quantity.
class Check {
public:
    Check(std::string id, std::string title) { r_.id = std::move(id), r_.title = std::move(title); }

    void expect(bool ok, const std::string& what) {
        if (!ok && r_.passed) {
            r_.passed = false;
            r_.detail = what;
        }
    }

    void worst(const std::string& name, double value) {
        if (value > worst_) {
            worst_ = value;
            worst_name_ = name;
        }
    }

    CriterionResult done() {
        if (r_.passed && !worst_name_.empty()) r_.detail = worst_name_ + " " + fmt12(worst_);
        return r_;
    }

private:
    CriterionResult r_;
    double worst_ = -1;
    std::string worst_name_;
};

inline std::string num(double x) { return fmt12(x); }

struct Case {
    DiscreteGraph graph;
    std::vector<double> lengths;
    MetricGraph metric() const { return contract_zero_edges(graph, LengthVector(lengths)); }
};

inline Case random_case(Rng& rng, int max_edges = 5, double floor = 0.01) {
    std::uniform_int_distribution<int> pv(1, 4);
    const int V = pv(rng);
    std::uniform_int_distribution<int> pe(std::max(1, V - 1), std::max(max_edges, V - 1));
    const int E = pe(rng);
    DiscreteGraph g = families::random_graph(rng, V, E);
    return {g, families::random_lengths(rng, E, floor)};
}

inline double gap_sq(const MetricGraph& m) {
    const double k = spectral_gap(m);
    return k * k;
}

}  // namespace detail

inline CriterionResult a1() {
    detail::Check c("A1", "equilateral stars: k1 = pi E / 2 with multiplicity E - 1");
    for (int E = 2; E <= 5; ++E) {
        Eigenpair p = first_positive_eigenvalue(equilateral(families::star(E)));
        const double err = std::abs(p.k - pi * E / 2);
        c.worst("max |k1 - pi E/2| =", err);
        c.expect(err <= 1e-8, "star " + std::to_string(E) + ": k1 = " + detail::num(p.k));
        c.expect(p.multiplicity == E - 1, "star " + std::to_string(E) + ": multiplicity " + std::to_string(p.multiplicity) +
                                              ", expected " + std::to_string(E - 1));
    }
    return c.done();
}

inline CriterionResult a2() {
    detail::Check c("A2", "equilateral flowers: k1 = pi E");
    for (int E = 2; E <= 4; ++E) {
        const double k = spectral_gap(equilateral(families::flower(E)));
        const double err = std::abs(k - pi * E);
        c.worst("max |k1 - pi E| =", err);
        c.expect(err <= 1e-8, "flower " + std::to_string(E) + ": k1 = " + detail::num(k));
    }
    return c.done();
}

inline CriterionResult a3() {
    detail::Check c("A3", "equilateral stowers: k1 = pi (2 Ep + El) / 2");
    for (auto [p, l] : std::vector<std::pair<int, int>>{{3, 2}, {2, 2}, {1, 3}, {2, 1}, {3, 1}}) {
        const double k = spectral_gap(make_metric(families::stower(p, l), families::stower_lengths(p, l)));
        const double err = std::abs(k - pi * (2 * p + l) / 2);
        c.worst("max error =", err);
        c.expect(err <= 1e-8, "stower(" + std::to_string(p) + "," + std::to_string(l) + "): k1 = " + detail::num(k));
    }
    const std::vector<std::pair<std::pair<int, int>, double>> small{{{1, 3}, 2.5 * pi}, {{2, 1}, 2.5 * pi}, {{3, 1}, 3.5 * pi}};
    for (auto [pl, value] : small) {
        const double k = spectral_gap(make_metric(families::stower(pl.first, pl.second),
                                                  families::stower_lengths(pl.first, pl.second)));
        c.expect(std::abs(k - value) <= 1e-8, "small stower value mismatch: " + detail::num(k));
    }
    return c.done();
}

inline CriterionResult a4() {
    detail::Check c("A4", "equilateral mandarins: k1 = pi E with multiplicity E - 1");
    for (int E = 2; E <= 4; ++E) {
        Eigenpair p = first_positive_eigenvalue(equilateral(families::mandarin(E)));
        const double err = std::abs(p.k - pi * E);
        c.worst("max |k1 - pi E| =", err);
        c.expect(err <= 1e-8, "mandarin " + std::to_string(E) + ": k1 = " + detail::num(p.k));
        c.expect(p.multiplicity == E - 1, "mandarin " + std::to_string(E) + ": multiplicity " +
                                              std::to_string(p.multiplicity) + ", expected " + std::to_string(E - 1));
    }
    return c.done();
}

inline CriterionResult a5() {
    detail::Check c("A5", "gap gradient matches central differences of k1^2");
    detail::Rng rng(505);
    const double h = 1e-6;
    int done = 0;
    while (done < 50) {
        auto cs = detail::random_case(rng, 5, 0.02);
        MetricGraph m = cs.metric();
        Eigenpair p = first_positive_eigenvalue(m);
        if (p.multiplicity != 1) continue;
        auto en = edge_energies(m).values;
        for (int e = 0; e < m.edge_count(); ++e) {
            auto up = m.lengths(), down = m.lengths();
            up[e] += h;
            down[e] -= h;
            const double fd = (detail::gap_sq(m.with_lengths(up)) - detail::gap_sq(m.with_lengths(down))) / (2 * h);
            const double rel = std::abs(fd + en[e]) / en[e];
            c.worst("max relative error", rel);
            c.expect(rel <= 1e-4, "graph " + std::to_string(done) + " edge " + std::to_string(e) + ": FD " +
                                      detail::num(fd) + " vs -E " + detail::num(-en[e]));
        }
        ++done;
    }
    return c.done();
}

inline CriterionResult a6() {
    detail::Check c("A6", "infimum bounds pi (bridged) and 2 pi (bridgeless), attained by infimize_gap");
    const std::vector<std::pair<std::string, DiscreteGraph>> topologies{
        {"star3", families::star(3)},        {"path3", families::path(3)},
        {"dumbbell", families::dumbbell()},  {"stower12", families::stower(1, 2)},
        {"caterpillar", families::caterpillar(3, {1, 2})},
        {"cycle3", families::cycle(3)},      {"mandarin3", families::mandarin(3)},
        {"flower2", families::flower(2)},    {"necklace2", families::necklace(2)},
        {"theta", DiscreteGraph(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}})}};
    detail::Rng rng(606);
    for (const auto& [name, g] : topologies) {
        const bool bridged = !find_bridges(g).empty();
        const double bound = bridged ? pi : 2 * pi;
        for (int s = 0; s < 500; ++s) {
            const double k = spectral_gap(make_metric(g, families::random_lengths(rng, g.edge_count())));
            c.worst("min slack", -(k - bound));
            c.expect(k >= bound - 1e-8, name + ": k1 = " + detail::num(k) + " below " + detail::num(bound));
        }
        auto inf = infimize_gap(g);
        c.expect(std::abs(inf.gap - bound) <= 1e-8, name + ": infimize_gap gives " + detail::num(inf.gap));
    }
    return c.done();
}

inline CriterionResult a7() {
    detail::Check c("A7", "standarin chains: simple k1 = 2 pi, critical, k L_i = pi mu_i");
    const std::vector<std::pair<int, int>> shapes{{1, 1}, {2, 0}, {1, 2}, {3, 0}, {2, 1}, {2, 2}, {3, 1}};
    for (auto [M, S] : shapes)
        for (double leaf : {0.1, 0.2})
            for (int variant = 0; variant < 2; ++variant) {
                if (S == 0 && leaf != 0.1) continue;
                std::vector<double> w(M, 1.0);
                if (variant == 1)
                    for (int j = 0; j < M; ++j) w[j] = 1.0 + 0.5 * j;
                const std::string name = "standarin(2," + std::to_string(M) + "," + std::to_string(S) + ") leaf " +
                                         detail::num(leaf) + (variant ? " weighted" : "");
                MetricGraph m = make_metric(families::standarin(2, M, S),
                                            families::standarin_lengths(2, M, S, S > 0 ? leaf : 0.0, w));
                Eigenpair p = first_positive_eigenvalue(m);
                c.worst("max |k1 - 2 pi| =", std::abs(p.k - 2 * pi));
                c.expect(std::abs(p.k - 2 * pi) <= 1e-8, name + ": k1 = " + detail::num(p.k));
                c.expect(p.multiplicity == 1, name + ": multiplicity " + std::to_string(p.multiplicity));
                if (p.multiplicity != 1) continue;
                c.expect(is_critical(m).critical, name + ": not critical");
                auto pd = path_decomposition(m);
                for (const auto& piece : pd.pieces)
                    c.expect(std::abs(pd.k * piece.length - pi * piece.zeros) <= 1e-8,
                             name + ": k L = " + detail::num(pd.k * piece.length) + " vs pi mu = " +
                                 detail::num(pi * piece.zeros));
            }
    return c.done();
}

inline CriterionResult a8() {
    detail::Check c("A8", "interlacing of k_n(theta) on random graphs");
    detail::Rng rng(808);
    for (int s = 0; s < 20; ++s) {
        auto cs = detail::random_case(rng, 4, 0.02);
        MetricGraph m = cs.metric();
        std::uniform_int_distribution<int> pv(0, m.vertex_count() - 1);
        auto curve = dispersion_curve(m, pv(rng), 64, 7);
        const int N = static_cast<int>(curve.theta.size());
        double worst = 0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                for (int n = 0; n <= 5; ++n) {
                    worst = std::min(worst, curve.levels[j][n] - curve.levels[i][n]);
                    worst = std::min(worst, curve.levels[i][n + 1] - curve.levels[j][n]);
                }
        c.worst("most negative slack", -worst);
        c.expect(worst >= -1e-8, "graph " + std::to_string(s) + ": slack " + detail::num(worst));
    }
    return c.done();
}

inline CriterionResult a9() {
    detail::Check c("A9", "gluing: flower(2) + flower(3) equality and subadditivity");
    MetricGraph f2 = equilateral(families::flower(2)), f3 = equilateral(families::flower(3));
    const double k = spectral_gap(glue(f2, 0, f3, 0, 0.4));
    const double sum = spectral_gap(f2) + spectral_gap(f3);
    c.expect(std::abs(k - 5 * pi) <= 1e-8 && std::abs(k - sum) <= 1e-8, "glued flowers: k1 = " + detail::num(k));
    detail::Rng rng(909);
    for (int s = 0; s < 50; ++s) {
        MetricGraph m1 = detail::random_case(rng, 3).metric(), m2 = detail::random_case(rng, 3).metric();
        std::uniform_int_distribution<int> p1(0, m1.vertex_count() - 1), p2(0, m2.vertex_count() - 1);
        const double k1 = spectral_gap(m1), k2 = spectral_gap(m2);
        const double kg = spectral_gap(glue(m1, p1(rng), m2, p2(rng), k1 / (k1 + k2)));
        c.worst("max excess", kg - k1 - k2);
        c.expect(kg <= k1 + k2 + 1e-8, "gluing " + std::to_string(s) + ": " + detail::num(kg) + " > " + detail::num(k1 + k2));
    }
    return c.done();
}

inline CriterionResult a10() {
    detail::Check c("A10", "optimizer reaches 2 pi on star-4 and contracts the stower(1,1) leaf");
    detail::Rng rng(1010);
    for (int s = 0; s < 10; ++s) {
        OptimizeOptions opt;
        opt.seed = static_cast<std::uint64_t>(s + 1);
        auto r = maximize_gap(families::star(4), LengthVector(families::random_lengths(rng, 4)), opt);
        c.worst("max shortfall", 2 * pi - r.gap);
        c.expect(r.gap >= 2 * pi - 1e-6, "star-4 start " + std::to_string(s) + ": gap " + detail::num(r.gap));
    }
    for (int s = 0; s < 3; ++s) {
        auto r = maximize_gap(families::stower(1, 1), LengthVector(families::random_lengths(rng, 2)));
        c.expect(r.lengths[1] == 0, "stower(1,1): leaf not contracted");
        c.expect(r.gap >= 2 * pi - 1e-6, "stower(1,1): gap " + detail::num(r.gap));
    }
    return c.done();
}

inline CriterionResult a11() {
    detail::Check c("A11", "symmetrization never lowers the gap");
    detail::Rng rng(1111);
    for (int s = 0; s < 200; ++s) {
        std::uniform_int_distribution<int> pv(1, 3);
        const int V = pv(rng);
        std::uniform_int_distribution<int> pe(std::max(1, V - 1), 3);
        DiscreteGraph base = families::random_graph(rng, V, pe(rng));
        std::uniform_int_distribution<int> pick(0, V - 1);
        const int v = pick(rng);
        const bool loops = std::bernoulli_distribution(0.5)(rng);
        std::vector<Edge> edges = base.edges();
        int W = V;
        std::vector<int> group;
        for (int i = 0; i < 2; ++i) {
            group.push_back(static_cast<int>(edges.size()));
            if (loops) edges.push_back({v, v});
            else edges.push_back({v, W++});
        }
        DiscreteGraph g(W, edges);
        if (!loops && g.is_leaf(v)) continue;
        MetricGraph m = make_metric(g, families::random_lengths(rng, g.edge_count(), 0.01));
        const double before = spectral_gap(m);
        const double after = spectral_gap(m.with_lengths(symmetrize(m, v, group)));
        c.worst("max decrease", before - after);
        c.expect(after >= before - 1e-10, "instance " + std::to_string(s) + ": " + detail::num(before) + " -> " + detail::num(after));
    }
    return c.done();
}

inline CriterionResult a12() {
    detail::Check c("A12", "k1 <= pi (E - El / 2) on sampled graphs");
    detail::Rng rng(1212);
    std::vector<detail::Case> cases;
    for (int s = 0; s < 300; ++s) cases.push_back(detail::random_case(rng, 6, 0.0));
    for (const auto& e : default_catalog()) cases.push_back({e.graph(), e.lengths()});
    int checked = 0;
    for (const auto& cs : cases) {
        double bound;
        try {
            bound = upper_bound(cs.graph);
        } catch (const NotApplicableError&) {
            continue;
        }
        const double k = spectral_gap(cs.metric());
        ++checked;
        c.worst("max excess", k - bound);
        c.expect(k <= bound + 1e-8, "k1 = " + detail::num(k) + " exceeds bound " + detail::num(bound));
    }
    c.expect(checked > 200, "too few applicable samples");
    return c.done();
}

inline CriterionResult a13() {
    detail::Check c("A13", "tree diameter bound and k1 <= pi / d");
    detail::Rng rng(1313);
    for (int s = 0; s < 200; ++s) {
        std::uniform_int_distribution<int> pv(2, 8);
        DiscreteGraph g = families::random_tree(rng, pv(rng));
        MetricGraph m = make_metric(g, families::random_lengths(rng, g.edge_count(), 0.0));
        const double d = tree_diameter(m);
        const double leaves = static_cast<double>(g.leaves().size());
        c.expect(d >= 2 / leaves - 1e-12, "tree " + std::to_string(s) + ": diameter " + detail::num(d));
        const double k = spectral_gap(m);
        c.worst("max excess over pi/d", k - pi / d);
        c.expect(k <= pi / d + 1e-8, "tree " + std::to_string(s) + ": k1 = " + detail::num(k) + " > pi/d");
    }
    return c.done();
}

inline CriterionResult a14() {
    detail::Check c("A14", "stower(1,1) eigenvalues are the zeros of the explicit secular function");
    for (double ell : {0.1, 0.2, 1.0 / 3}) {
        auto F = [ell](double k) {
            return 2 * std::cos(k * ell) * std::sin(k * (1 - ell) / 2) + std::sin(k * ell) * std::cos(k * (1 - ell) / 2);
        };
        const double kmax = 30;
        std::vector<double> roots;
        const int n = 300000;
        for (int i = 0; i < n; ++i) {
            double a = kmax * i / n + 1e-9, b = kmax * (i + 1) / n + 1e-9;
            if (F(a) == 0) {
                roots.push_back(a);
                continue;
            }
            if ((F(a) < 0) == (F(b) < 0)) continue;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (a + b);
                ((F(mid) < 0) == (F(a) < 0) ? a : b) = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        MetricGraph m = make_metric(families::stower(1, 1), {1 - ell, ell});
        auto flat = eigenvalues(m, kmax).flat();
        std::vector<double> positive;
        for (double k : flat)
            if (k > 0) positive.push_back(k);
        const std::string tag = "ell " + detail::num(ell);
        for (double r : roots) {
            double best = 1e300;
            for (double k : positive) best = std::min(best, std::abs(k - r));
            c.worst("max root distance", best);
            c.expect(best <= 1e-8, tag + ": root " + detail::num(r) + " of F has no eigenvalue");
        }
        for (double k : positive) {
            double best = 1e300;
            for (double r : roots) best = std::min(best, std::abs(k - r));
            const double loop_mode = std::abs(std::sin(k * (1 - ell) / 2));
            c.expect(best <= 1e-8 || loop_mode <= 1e-8, tag + ": eigenvalue " + detail::num(k) + " is not a root");
        }
        c.expect(!positive.empty() && positive[0] < 2 * pi, tag + ": k1 not below 2 pi");
    }
    return c.done();
}

inline CriterionResult a15() {
    detail::Check c("A15", "continuity under bridge contraction and composite vertex limits");
    const DiscreteGraph g = families::dumbbell();
    const double target = spectral_gap(make_metric(g, {0.4, 0.0, 0.6}));
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double k = spectral_gap(make_metric(g, {0.4 * (1 - eps), eps, 0.6 * (1 - eps)}));
        const double diff = std::abs(k - target);
        c.expect(diff < prev, "difference not decreasing at eps " + detail::num(eps));
        prev = diff;
    }
    c.expect(prev <= 0.05, "difference at eps 1e-4 is " + detail::num(prev));
    double worst = 0;
    for (auto [d1, d2] : std::vector<std::pair<int, int>>{{2, 3}, {3, 3}, {3, 4}, {4, 2}, {5, 3}}) {
        CMatrix s = composite_vertex_scattering(d1, d2, 5.0, 1e-9);
        const int n = d1 + d2 - 2;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double expect = 2.0 / n - (i == j ? 1.0 : 0.0);
                worst = std::max(worst, std::abs(s(i, j) - expect));
            }
    }
    c.worst("max composite vertex deviation", worst);
    c.expect(worst <= 1e-6, "composite vertex deviation " + detail::num(worst));
    return c.done();
}

inline CriterionResult a16() {
    detail::Check c("A16", "simple gap eigenfunctions have two nodal domains");
    detail::Rng rng(1616);
    std::vector<MetricGraph> corpus;
    for (int s = 0; s < 100; ++s) corpus.push_back(detail::random_case(rng, 5, 0.01).metric());
    for (const auto& e : default_catalog()) corpus.push_back(contract_zero_edges(e.graph(), LengthVector(e.lengths())));
    corpus.push_back(make_metric(families::stower(1, 1), {0.8, 0.2}));
    int checked = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        Eigenpair p = gap_eigenpair(corpus[i]);
        if (p.multiplicity != 1) continue;
        ++checked;
        const int n = nodal_count(corpus[i], p.basis[0]);
        c.expect(n == 2, "graph " + std::to_string(i) + ": " + std::to_string(n) + " nodal domains");
    }
    c.expect(checked >= 50, "too few simple cases");
    return c.done();
}

inline std::vector<std::function<CriterionResult()>> acceptance_suite() {
    return {a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12, a13, a14, a15, a16};
}

/// Closed-form gaps of the catalog, one result per entry.
inline std::vector<CriterionResult> catalog_suite() {
    std::vector<CriterionResult> r;
    for (const auto& e : default_catalog()) {
        const double k = spectral_gap(contract_zero_edges(e.graph(), LengthVector(e.lengths())));
        const double expect = catalog_gap(e);
        CriterionResult c{e.name(), "closed-form gap " + fmt12(expect), std::abs(k - expect) <= 1e-8,
                          "computed " + fmt12(k)};
        r.push_back(c);
    }
    return r;
}

inline std::string format_line(const CriterionResult& r) {
    return std::string(r.passed ? "PASS " : "FAIL ") + r.id + "  " + r.title + (r.detail.empty() ? "" : "  [" + r.detail + "]");
}

}  // namespace qgraph::verify
