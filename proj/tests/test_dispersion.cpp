#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "qgraph/dispersion.hpp"
#include "qgraph/families.hpp"

using namespace qgraph;

namespace {

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (a + b), fm = f(mid);
        if ((fm < 0) == (fa < 0)) a = mid, fa = fm;
        else b = mid;
    }
    return 0.5 * (a + b);
}

// Symmetric loop modes at a delta vertex: 2k tan(k/2) = tan(theta/2).
double loop_branch(double theta, double a, double b) {
    const double t = std::tan(theta / 2);
    return bisect([&](double k) { return 2 * k * std::sin(k / 2) - t * std::cos(k / 2); }, a, b);
}

}  // namespace

TEST(Marked, EndpointsAreNeumannAndDirichlet) {
    MetricGraph m = make_metric(families::stower(1, 2), {0.5, 0.2, 0.3});
    auto n = spectrum_theta(m, 0, 0.0, 20).flat();
    auto plain = eigenvalues(m, 20).flat();
    ASSERT_EQ(n.size(), plain.size());
    for (std::size_t i = 0; i < n.size(); ++i) EXPECT_NEAR(n[i], plain[i], 1e-10);
    auto d = spectrum_theta(m, 0, pi, 20).flat();
    auto dir = eigenvalues(m.with_condition(0, VertexCondition::dirichlet()), 20).flat();
    ASSERT_EQ(d.size(), dir.size());
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], dir[i], 1e-10);
}

TEST(Dispersion, LoopFlatBands) {
    Dispersion d(equilateral(families::cycle(1)), 0);
    ASSERT_GE(d.flat_bands().size(), 2u);
    for (std::size_t n = 0; n < d.flat_bands().size(); ++n) EXPECT_NEAR(d.flat_bands()[n], 2 * pi * (n + 1), 1e-9);
    EXPECT_TRUE(d.in_flat_band(4 * pi));
    EXPECT_FALSE(d.in_flat_band(3 * pi));
}

TEST(Dispersion, LoopBranchMatchesSecularEquation) {
    Dispersion d(equilateral(families::cycle(1)), 0);
    for (double th : {0.3, 1.0, 2.0, 3.0}) EXPECT_NEAR(d.K(th), loop_branch(th, 1e-9, pi - 1e-9), 1e-9);
    EXPECT_NEAR(d.K(pi), pi, 1e-9);
    EXPECT_NEAR(d.K(1.5 * pi), loop_branch(-0.5 * pi, pi + 1e-9, 2 * pi - 1e-9), 1e-9);
    EXPECT_NEAR(d.K(2 * pi), 2 * pi, 1e-9);
    EXPECT_NEAR(d.K(2.5 * pi), loop_branch(0.5 * pi, 2 * pi + 1e-9, 3 * pi - 1e-9), 1e-9);
    EXPECT_THROW(d.K(-pi), InvalidInputError);
    EXPECT_THROW(d.K(3.1 * pi), InvalidInputError);
}

TEST(Dispersion, BranchIsMonotone) {
    std::mt19937_64 rng(51);
    for (int s = 0; s < 5; ++s) {
        MetricGraph m = make_metric(families::random_graph(rng, 3, 4), families::random_lengths(rng, 4, 0.05));
        Dispersion d(m, 1);
        double prev = -1e300;
        for (int j = 1; j <= 40; ++j) {
            const double th = -pi + 4 * pi * j / 40;
            const double k = d.K(th);
            EXPECT_GE(k, prev - 1e-9);
            prev = k;
        }
    }
}

TEST(Dispersion, CurveInterlaces) {
    std::mt19937_64 rng(53);
    MetricGraph m = make_metric(families::random_graph(rng, 3, 5), families::random_lengths(rng, 5, 0.05));
    auto c = dispersion_curve(m, 0, 64);
    ASSERT_EQ(c.theta.size(), 64u);
    EXPECT_DOUBLE_EQ(c.theta.back(), pi);
    for (std::size_t i = 0; i < c.theta.size(); ++i)
        for (std::size_t j = i + 1; j < c.theta.size(); ++j)
            for (int n = 0; n < 5; ++n) {
                EXPECT_LE(c.levels[i][n], c.levels[j][n] + 1e-8);
                EXPECT_LE(c.levels[j][n], c.levels[i][n + 1] + 1e-8);
            }
    EXPECT_THROW(dispersion_curve(m, 0, 32), InvalidInputError);
}

TEST(Sgp, StarCenterIsStrong) {
    SgpReport r = spectral_gap_parameter(equilateral(families::star(3)), 0);
    EXPECT_EQ(r.classification, SgpClass::strong);
    EXPECT_NEAR(r.theta_sg, pi, 1e-8);
    EXPECT_EQ(r.neumann_multiplicity, 2);
    EXPECT_EQ(r.dirichlet_multiplicity, 3);
    EXPECT_TRUE(r.gap_in_flat_band);
}

TEST(Sgp, UnequalFlowerViolates) {
    SgpReport r = spectral_gap_parameter(make_metric(families::flower(2), {0.6, 0.4}), 0);
    EXPECT_EQ(r.classification, SgpClass::violates);
    EXPECT_NEAR(r.theta_sg, 2 * pi, 1e-8);
}

TEST(Sgp, IntervalEndViolates) {
    SgpReport r = spectral_gap_parameter(make_metric(families::path(1), {1.0}), 0);
    EXPECT_EQ(r.classification, SgpClass::violates);
    EXPECT_GT(r.theta_sg, pi);
}

TEST(Sgp, ResidualIsSmall) {
    SgpReport r = spectral_gap_parameter(equilateral(families::flower(2)), 0);
    EXPECT_EQ(r.classification, SgpClass::strong);
    EXPECT_LT(std::abs(r.residual), 1e-8);
}

TEST(Glue, VertexMapAndScaling) {
    MetricGraph a = equilateral(families::path(2)), b = equilateral(families::star(3));
    MetricGraph g = glue(a, 2, b, 1, 0.25);
    EXPECT_EQ(g.vertex_count(), 3 + 4 - 1);
    EXPECT_EQ(g.edge_count(), 5);
    EXPECT_NEAR(g.total_length(), 1.0, 1e-15);
    EXPECT_NEAR(g.length(0), 0.125, 1e-15);
    EXPECT_NEAR(g.length(2), 0.25, 1e-15);
    // Edge (0,1) of b has its endpoint 1 glued to vertex 2 of a.
    EXPECT_EQ(g.graph().edge(2).u, 3);
    EXPECT_EQ(g.graph().edge(2).v, 2);
    EXPECT_EQ(glue(a, 0, b, 0, 0.0).edge_count(), 3);
    EXPECT_THROW(glue(a, 5, b, 0, 0.5), InvalidInputError);
    EXPECT_THROW(glue(a, 0, b, 0, 1.5), InvalidInputError);
}

TEST(Glue, FlowersAttainEquality) {
    GluingReport r = gluing_bound_check(equilateral(families::flower(2)), 0, equilateral(families::flower(3)), 0);
    EXPECT_NEAR(r.optimal_L, 0.4, 1e-14);
    EXPECT_NEAR(r.glued_gap, 5 * pi, 1e-8);
    EXPECT_TRUE(r.equality);
    EXPECT_TRUE(r.theta_condition);
    EXPECT_TRUE(r.gaps_in_flat_bands);
    EXPECT_GT(r.glued_multiplicity, 1);
    EXPECT_TRUE(r.consistent);
}

TEST(Glue, IntervalsAreStrict) {
    MetricGraph i = make_metric(families::path(1), {1.0});
    GluingReport r = gluing_bound_check(i, 0, i, 0);
    EXPECT_TRUE(r.subadditive);
    EXPECT_FALSE(r.equality);
    EXPECT_TRUE(r.consistent);
}
