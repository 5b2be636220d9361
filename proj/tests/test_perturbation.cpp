#include <gtest/gtest.h>

#include <random>

#include "qgraph/families.hpp"
#include "qgraph/perturbation.hpp"

using namespace qgraph;

namespace {

MetricGraph random_simple(std::mt19937_64& rng) {
    while (true) {
        std::uniform_int_distribution<int> pv(1, 4);
        int V = pv(rng);
        std::uniform_int_distribution<int> pe(std::max(1, V - 1), 5);
        int E = pe(rng);
        MetricGraph m = make_metric(families::random_graph(rng, V, E), families::random_lengths(rng, E, 0.03));
        if (first_positive_eigenvalue(m).multiplicity == 1) return m;
    }
}

}  // namespace

TEST(Energies, CentralDifferences) {
    std::mt19937_64 rng(31);
    const double h = 1e-6;
    for (int s = 0; s < 30; ++s) {
        MetricGraph m = random_simple(rng);
        auto grad = gap_gradient(m);
        for (int e = 0; e < m.edge_count(); ++e) {
            auto up = m.lengths(), down = m.lengths();
            up[e] += h;
            down[e] -= h;
            const double ku = spectral_gap(m.with_lengths(up)), kd = spectral_gap(m.with_lengths(down));
            const double fd = (ku * ku - kd * kd) / (2 * h);
            EXPECT_NEAR(fd, grad[e], 1e-4 * std::abs(grad[e]));
        }
    }
}

TEST(Energies, WeightedSumIsTwiceLambda) {
    std::mt19937_64 rng(37);
    for (int s = 0; s < 20; ++s) {
        MetricGraph m = random_simple(rng);
        EnergyVector en = edge_energies(m);
        double sum = 0;
        for (int e = 0; e < m.edge_count(); ++e) sum += en.values[e] * m.length(e);
        EXPECT_NEAR(sum, 2 * en.k * en.k, 1e-9 * en.k * en.k);
    }
}

TEST(Energies, DegenerateGapThrows) {
    MetricGraph m = equilateral(families::star(3));
    EXPECT_THROW(edge_energies(m), MultiplicityError);
    try {
        simple_gap(m);
    } catch (const MultiplicityError& e) {
        EXPECT_EQ(e.multiplicity(), 2);
    }
}

TEST(Criticality, StandarinIsCritical) {
    MetricGraph m = make_metric(families::standarin(2, 2, 1), families::standarin_lengths(2, 2, 1, 0.15, {1, 2}));
    auto r = is_critical(m);
    EXPECT_TRUE(r.critical);
    EXPECT_TRUE(r.vertex_conditions_hold());
    EXPECT_LT(r.spread, 1e-9);
}

TEST(Criticality, SubdividedIntervalIsCritical) {
    auto r = is_critical(make_metric(families::path(3), {0.2, 0.5, 0.3}));
    EXPECT_TRUE(r.critical);
    EXPECT_TRUE(r.vertex_conditions_hold());
}

TEST(Criticality, GenericLengthsAreNot) {
    std::vector<MetricGraph> cases{
        make_metric(families::star(3), {0.2, 0.3, 0.5}),
        make_metric(families::dumbbell(), {0.2, 0.5, 0.3}),
        make_metric(families::stower(1, 2), {0.5, 0.2, 0.3}),
        make_metric(families::mandarin(3), {0.2, 0.3, 0.5}),
    };
    for (const auto& m : cases) {
        auto r = is_critical(m);
        EXPECT_FALSE(r.critical);
        EXPECT_GT(r.spread, 1e-3);
    }
}

TEST(PathDecomposition, LengthsMatchZeroCounts) {
    std::vector<MetricGraph> cases{
        make_metric(families::standarin(2, 1, 1), families::standarin_lengths(2, 1, 1, 0.1)),
        make_metric(families::standarin(2, 3, 0), families::standarin_lengths(2, 3, 0, 0, {1, 3, 2})),
        make_metric(families::standarin(2, 2, 2), families::standarin_lengths(2, 2, 2, 0.1, {2, 1})),
        make_metric(families::path(3), {0.2, 0.5, 0.3}),
    };
    for (const auto& m : cases) {
        auto pd = path_decomposition(m);
        int covered = 0;
        for (const auto& piece : pd.pieces) {
            EXPECT_NEAR(pd.k * piece.length, pi * piece.zeros, 1e-8);
            covered += static_cast<int>(piece.edges.size());
            EXPECT_EQ(piece.vertices.size(), piece.edges.size() + 1);
        }
        EXPECT_EQ(covered, m.edge_count());
    }
}

TEST(PathDecomposition, NeedsCriticalPoint) {
    MetricGraph m = make_metric(families::star(3), {0.2, 0.3, 0.5});
    EXPECT_THROW(path_decomposition(m), PreconditionError);
}

TEST(Nodal, SimpleGapHasTwoDomains) {
    std::mt19937_64 rng(43);
    for (int s = 0; s < 30; ++s) EXPECT_EQ(nodal_count(random_simple(rng)), 2);
}

TEST(Nodal, HigherEigenfunctionOfInterval) {
    MetricGraph m = make_metric(families::path(1), {1.0});
    Spectrum s = eigenvalues(m, 10, true);
    ASSERT_GE(s.pairs.size(), 4u);
    for (int n = 1; n < 4; ++n) EXPECT_EQ(nodal_count(m, s.pairs[n].basis[0]), n + 1);
}
