#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "qgraph/families.hpp"
#include "qgraph/optimize.hpp"

using namespace qgraph;

TEST(Catalog, ClosedFormsMatchSpectrum) {
    auto cat = default_catalog();
    EXPECT_EQ(cat.size(), 30u);
    for (const auto& e : cat) {
        MetricGraph m = contract_zero_edges(e.graph(), LengthVector(e.lengths()));
        EXPECT_NEAR(spectral_gap(m), catalog_gap(e), 1e-8) << e.name();
    }
}

TEST(Catalog, InvalidEntries) {
    EXPECT_THROW(catalog_gap(CatalogEntry::stower(1, 1)), InvalidInputError);
    EXPECT_THROW(CatalogEntry::star(0).validate(), InvalidInputError);
}

TEST(UpperBound, ExcludedShapes) {
    EXPECT_THROW(upper_bound(families::path(1)), NotApplicableError);
    EXPECT_THROW(upper_bound(families::flower(1)), NotApplicableError);
    EXPECT_THROW(upper_bound(families::stower(1, 1)), NotApplicableError);
    EXPECT_NEAR(upper_bound(families::star(4)), 2 * pi, 1e-15);
    EXPECT_NEAR(upper_bound(families::mandarin(3)), 3 * pi, 1e-15);
}

TEST(UpperBound, HoldsOnRandomGraphs) {
    std::mt19937_64 rng(61);
    for (int s = 0; s < 100; ++s) {
        std::uniform_int_distribution<int> pv(2, 5);
        int V = pv(rng);
        std::uniform_int_distribution<int> pe(V - 1, V + 2);
        DiscreteGraph g = families::random_graph(rng, V, pe(rng));
        if (g.edge_count() <= 2) continue;
        MetricGraph m = make_metric(g, families::random_lengths(rng, g.edge_count()));
        EXPECT_LE(spectral_gap(m), upper_bound(g) + 1e-8);
    }
}

TEST(Symmetrize, AveragesGroupAndKeepsSum) {
    MetricGraph m = make_metric(families::stower(2, 3), {0.1, 0.3, 0.05, 0.25, 0.3});
    auto l = symmetrize(m, 0, {2, 3, 4});
    EXPECT_NEAR(l[2], 0.2, 1e-15);
    EXPECT_NEAR(l[4], 0.2, 1e-15);
    EXPECT_NEAR(std::accumulate(l.begin(), l.end(), 0.0), 1.0, 1e-15);
    auto p = symmetrize(m, 0, {0, 1});
    EXPECT_NEAR(p[0], 0.2, 1e-15);
    EXPECT_GE(spectral_gap(m.with_lengths(l)), spectral_gap(m) - 1e-10);
    EXPECT_GE(spectral_gap(m.with_lengths(p)), spectral_gap(m) - 1e-10);
}

TEST(Symmetrize, StarGapIncreases) {
    MetricGraph m = make_metric(families::star(3), {0.5, 0.3, 0.2});
    auto l = symmetrize(m, 0, {0, 1, 2});
    for (double x : l) EXPECT_NEAR(x, 1.0 / 3, 1e-15);
    EXPECT_GT(spectral_gap(m.with_lengths(l)), spectral_gap(m) + 1e-3);
    EXPECT_EQ(symmetrize(m.with_lengths(l), 0, {0, 1, 2}), l);
}

TEST(Symmetrize, TwoFlowerGapUnchanged) {
    MetricGraph m = make_metric(families::flower(2), {0.6, 0.4});
    auto l = symmetrize(m, 0, {0, 1});
    EXPECT_NEAR(l[0], 0.5, 1e-15);
    EXPECT_NEAR(spectral_gap(m), 2 * pi, 1e-10);
    EXPECT_NEAR(spectral_gap(m.with_lengths(l)), 2 * pi, 1e-10);
}

TEST(Symmetrize, RejectsBadGroups) {
    MetricGraph m = make_metric(families::stower(2, 2), {0.2, 0.3, 0.25, 0.25});
    EXPECT_THROW(symmetrize(m, 0, {0, 2}), InvalidGroupError);
    EXPECT_THROW(symmetrize(m, 0, {2, 2}), InvalidGroupError);
    EXPECT_THROW(symmetrize(m, 1, {2, 3}), InvalidGroupError);
    EXPECT_THROW(symmetrize(m, 0, {}), InvalidGroupError);
    EXPECT_THROW(symmetrize(m, 0, {9}), InvalidGroupError);
}

TEST(Symmetrize, GroupsOfStower) {
    auto groups = symmetrization_groups(families::stower(2, 3));
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].second, (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(groups[1].second, (std::vector<int>{0, 1}));
}

// KKT: the projection is max(y - tau, lo) for a single tau.
TEST(Projection, SatisfiesOptimalityConditions) {
    std::mt19937_64 rng(67);
    std::normal_distribution<double> n(0.2, 0.5);
    for (int s = 0; s < 200; ++s) {
        int dim = 2 + s % 6;
        std::vector<double> y(dim), x;
        for (double& t : y) t = n(rng);
        x = y;
        std::vector<char> active(dim, 1);
        detail::project_simplex(x, active, 1e-4);
        EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-12);
        double tau = 0;
        bool found = false;
        for (int i = 0; i < dim; ++i)
            if (x[i] > 1e-4 + 1e-12) {
                if (!found) tau = y[i] - x[i], found = true;
                EXPECT_NEAR(y[i] - x[i], tau, 1e-12);
            }
        ASSERT_TRUE(found);
        for (int i = 0; i < dim; ++i)
            if (x[i] <= 1e-4 + 1e-12) EXPECT_LE(y[i] - tau, 1e-4 + 1e-12);
    }
}

TEST(Projection, InactiveCoordinatesStayZero) {
    std::vector<double> x{0.5, 0.7, 0.2};
    detail::project_simplex(x, {1, 0, 1}, 1e-4);
    EXPECT_EQ(x[1], 0.0);
    EXPECT_NEAR(x[0] + x[2], 1.0, 1e-14);
}

TEST(Bundle, SingleFunctionIsScaledGradient) {
    auto d = detail::bundle_direction({{1.0, -2.0}}, {0.0}, 0.5);
    EXPECT_NEAR(d[0], 0.5, 1e-12);
    EXPECT_NEAR(d[1], -1.0, 1e-12);
}

TEST(Bundle, OpposedGradientsCancel) {
    auto d = detail::bundle_direction({{1.0, 0.0}, {-1.0, 0.0}}, {0.0, 0.0}, 1.0);
    EXPECT_NEAR(d[0], 0.0, 1e-6);
}

TEST(Maximize, StarReachesEquilateral) {
    auto r = maximize_gap(families::star(4), LengthVector({0.1, 0.2, 0.3, 0.4}));
    EXPECT_NEAR(r.gap, 2 * pi, 1e-6);
    EXPECT_EQ(r.classification, "maximizer-candidate");
    ASSERT_FALSE(r.trace.empty());
    EXPECT_EQ(r.trace.front().move, "init");
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i].gap, r.trace[i - 1].gap);
}

TEST(Maximize, StowerContractsLeaf) {
    auto r = maximize_gap(families::stower(1, 1), LengthVector({0.6, 0.4}));
    EXPECT_EQ(r.lengths[1], 0.0);
    EXPECT_NEAR(r.gap, 2 * pi, 1e-6);
    EXPECT_EQ(r.classification, "supremizer-candidate");
}

TEST(Maximize, MandarinReachesClosedForm) {
    auto r = maximize_gap(families::mandarin(3), LengthVector({0.2, 0.3, 0.5}));
    EXPECT_NEAR(r.gap, 3 * pi, 1e-6);
}

TEST(Maximize, DeterministicForSeed) {
    OptimizeOptions opt;
    opt.seed = 7;
    auto a = maximize_gap(families::dumbbell(), LengthVector({0.2, 0.5, 0.3}), opt);
    auto b = maximize_gap(families::dumbbell(), LengthVector({0.2, 0.5, 0.3}), opt);
    EXPECT_EQ(a.lengths, b.lengths);
    EXPECT_EQ(a.gap, b.gap);
    EXPECT_EQ(a.trace.size(), b.trace.size());
}

TEST(Maximize, NotBelowBruteForce) {
    DiscreteGraph g = families::stower(1, 2);
    auto grid = brute_force_gap(g, 20, BruteMode::max);
    auto r = maximize_gap(g, LengthVector({0.5, 0.3, 0.2}));
    EXPECT_GE(r.gap, grid.gap - 1e-8);
    EXPECT_EQ(grid.classification, "grid-optimum");
}

TEST(Infimum, BridgeOrEdge) {
    auto a = infimize_gap(families::dumbbell());
    EXPECT_NEAR(a.gap, pi, 1e-10);
    EXPECT_EQ(a.lengths, (std::vector<double>{0, 1, 0}));
    auto b = infimize_gap(families::mandarin(4));
    EXPECT_NEAR(b.gap, 2 * pi, 1e-10);
    EXPECT_EQ(b.classification, "infimizer");
    auto grid = brute_force_gap(families::mandarin(3), 12, BruteMode::min);
    EXPECT_NEAR(grid.gap, 2 * pi, 1e-8);
}

TEST(BruteForce, Limits) {
    EXPECT_THROW(brute_force_gap(families::star(6), 4, BruteMode::max), ResourceError);
    EXPECT_THROW(brute_force_gap(families::star(3), 41, BruteMode::max), ResourceError);
    EXPECT_THROW(brute_force_gap(families::star(3), 0, BruteMode::max), InvalidInputError);
}
