#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "qgraph/families.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectral.hpp"

using namespace qgraph;

namespace {

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
        double mid = 0.5 * (a + b), fm = f(mid);
        if ((fm < 0) == (fa < 0)) a = mid, fa = fm;
        else b = mid;
    }
    return 0.5 * (a + b);
}

// Positive roots of sum tan(k l_e) below kmax: one between consecutive poles.
std::vector<double> star_roots(const std::vector<double>& l, double kmax) {
    std::vector<double> poles{0};
    for (double x : l)
        for (int n = 0; (n + 0.5) * pi / x < kmax + 10; ++n) poles.push_back((n + 0.5) * pi / x);
    std::sort(poles.begin(), poles.end());
    auto f = [&](double k) {
        double s = 0;
        for (double x : l) s += std::tan(k * x);
        return s;
    };
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
        double a = poles[i] + 1e-12, b = poles[i + 1] - 1e-12;
        if (i == 0) continue;
        double k = bisect(f, a, b);
        if (k < kmax) r.push_back(k);
    }
    return r;
}

std::vector<double> positive(const Spectrum& s) {
    std::vector<double> r;
    for (double k : s.flat())
        if (k > 0) r.push_back(k);
    return r;
}

}  // namespace

TEST(Spectrum, GenericStarMatchesTanSum) {
    std::mt19937_64 rng(21);
    for (int s = 0; s < 20; ++s) {
        int E = 3 + s % 3;
        auto l = families::random_lengths(rng, E, 0.05);
        auto expect = star_roots(l, 40);
        auto got = positive(eigenvalues(make_metric(families::star(E), l), 40));
        ASSERT_EQ(got.size(), expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-9 * expect[i]);
    }
}

TEST(Spectrum, CircleIsDoublyDegenerate) {
    Spectrum s = eigenvalues(equilateral(families::cycle(1)), 20);
    ASSERT_EQ(s.pairs.size(), 4u);
    EXPECT_EQ(s.pairs[0].k, 0.0);
    EXPECT_EQ(s.pairs[0].multiplicity, 1);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_NEAR(s.pairs[n].k, 2 * pi * n, 1e-10);
        EXPECT_EQ(s.pairs[n].multiplicity, 2);
    }
}

TEST(Spectrum, EquilateralStarCatalog) {
    Eigenpair p = first_positive_eigenvalue(equilateral(families::star(3)));
    EXPECT_NEAR(p.k, 1.5 * pi, 1e-12);
    EXPECT_EQ(p.multiplicity, 2);
}

TEST(Spectrum, MandarinMultiplicityIsEdgeCount) {
    for (int E = 2; E <= 4; ++E) {
        Eigenpair p = first_positive_eigenvalue(equilateral(families::mandarin(E)));
        EXPECT_NEAR(p.k, pi * E, 1e-10);
        EXPECT_EQ(p.multiplicity, E);
    }
}

TEST(Spectrum, DirichletInterval) {
    VertexConditionMap c{VertexCondition::dirichlet(), VertexCondition::dirichlet()};
    Spectrum s = eigenvalues(make_metric(families::path(1), {1.0}, c), 10);
    ASSERT_EQ(s.pairs.size(), 3u);
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(s.pairs[n].k, pi * (n + 1), 1e-11);
    c[1] = VertexCondition::neumann();
    EXPECT_NEAR(spectral_gap(make_metric(families::path(1), {1.0}, c)), pi / 2, 1e-11);
}

TEST(Spectrum, DeltaIntervalPositive) {
    for (double theta : {0.5, 1.5, 2.5}) {
        VertexConditionMap c{VertexCondition::delta(theta), VertexCondition::neumann()};
        const double alpha = std::tan(theta / 2);
        auto f = [&](double k) { return k * std::sin(k) - alpha * std::cos(k); };
        auto got = positive(eigenvalues(make_metric(families::path(1), {1.0}, c), 12));
        std::vector<double> expect{bisect(f, 1e-9, pi / 2)};
        for (int n = 1; n < 4; ++n) expect.push_back(bisect(f, (n - 0.5) * pi, (n + 0.5) * pi));
        ASSERT_EQ(got.size(), 4u);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], expect[i], 1e-10);
    }
}

TEST(Spectrum, DeltaIntervalNegative) {
    VertexConditionMap c{VertexCondition::delta(-2.0), VertexCondition::neumann()};
    const double alpha = std::tan(-1.0);
    const double kappa = bisect([&](double x) { return x * std::tanh(x) + alpha; }, 1e-9, 10);
    Spectrum s = eigenvalues(make_metric(families::path(1), {1.0}, c), 5);
    ASSERT_FALSE(s.pairs.empty());
    EXPECT_NEAR(s.pairs[0].k, -kappa, 1e-10);
    EXPECT_NEAR(s.pairs[0].lambda(), -kappa * kappa, 1e-9);
}

TEST(Spectrum, WeylLaw) {
    std::mt19937_64 rng(5);
    for (int s = 0; s < 10; ++s) {
        DiscreteGraph g = families::random_graph(rng, 3, 5);
        MetricGraph m = make_metric(g, families::random_lengths(rng, 5, 0.02));
        const double k = 150;
        const int n = static_cast<int>(eigenvalues(m, k).flat().size());
        EXPECT_LE(std::abs(n - k / pi), 2.0 * g.edge_count());
    }
}

TEST(Spectrum, CountAgreesWithList) {
    std::mt19937_64 rng(8);
    MetricGraph m = make_metric(families::random_graph(rng, 4, 6), families::random_lengths(rng, 6, 0.02));
    auto flat = eigenvalues(m, 30).flat();
    for (double k : {3.3, 11.7, 25.1}) {
        int below = static_cast<int>(std::count_if(flat.begin(), flat.end(), [&](double x) { return x < k; }));
        EXPECT_EQ(eigenvalue_count_below(m, k), below);
    }
}

TEST(Secular, VanishesAtEigenvalues) {
    std::mt19937_64 rng(13);
    for (int s = 0; s < 10; ++s) {
        MetricGraph m = make_metric(families::random_graph(rng, 3, 4), families::random_lengths(rng, 4, 0.05));
        for (double k : positive(eigenvalues(m, 20))) EXPECT_LT(secular_value(m, k), 1e-8);
        EXPECT_GT(secular_value(m, 0.5 * (spectral_gap(m))), 1e-4);
    }
}

TEST(Secular, ScatteringIsUnitary) {
    MetricGraph m = equilateral(families::stower(2, 2));
    CMatrix u = BondScattering(m).matrix(3.7);
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm(), 1e-12);
    MetricGraph d = m.with_condition(1, VertexCondition::delta(1.2));
    CMatrix ud = BondScattering(d).matrix(2.1);
    EXPECT_LT((ud.adjoint() * ud - CMatrix::Identity(ud.rows(), ud.cols())).norm(), 1e-12);
}

TEST(Secular, FourMandarinHasFourSmallSingularValues) {
    Eigen::VectorXd sv = secular_singular_values(equilateral(families::mandarin(4)), 4 * pi);
    int small = 0;
    for (int i = 0; i < sv.size(); ++i) small += sv(i) < 1e-8;
    EXPECT_EQ(small, 4);
}

TEST(Eigenfunctions, SatisfyVertexConditions) {
    std::mt19937_64 rng(17);
    for (int s = 0; s < 20; ++s) {
        MetricGraph m = make_metric(families::random_graph(rng, 3, 5), families::random_lengths(rng, 5, 0.02));
        Eigenpair p = gap_eigenpair(m);
        ASSERT_EQ(static_cast<int>(p.basis.size()), p.multiplicity);
        for (const auto& f : p.basis) {
            EXPECT_NEAR(l2_norm(m, f), 1.0, 1e-10);
            const double sup = sup_norm(m, f);
            for (int v = 0; v < m.vertex_count(); ++v) {
                for (int b : m.graph().bonds_from(v)) EXPECT_NEAR(bond_value(m, f, b), vertex_value(m, f, v), 1e-8 * sup);
                EXPECT_NEAR(derivative_sum(m, f, v), 0.0, 1e-8 * sup * p.k);
            }
            EXPECT_NEAR(integral(m, f), 0.0, 1e-9);
            EXPECT_NEAR(rayleigh(m, TestFunction::from(m, f)), p.k * p.k, 1e-8 * p.k * p.k);
        }
    }
}

TEST(Eigenfunctions, DegenerateBasisIsOrthonormal) {
    MetricGraph m = equilateral(families::star(4));
    Eigenpair p = gap_eigenpair(m);
    ASSERT_EQ(p.multiplicity, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(l2_inner(m, p.basis[i], p.basis[j]), i == j ? 1.0 : 0.0, 1e-10);
}

// Continuous functions c + a cos(wx) + b sin(wx) per edge with random vertex values.
TEST(MinMax, RandomTestFunctionsStayAboveGap) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1, 1), w(0.5, 6);
    for (int s = 0; s < 20; ++s) {
        MetricGraph m = make_metric(families::random_graph(rng, 4, 5), families::random_lengths(rng, 5, 0.05));
        const double k1 = spectral_gap(m);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> fv(m.vertex_count());
            for (double& x : fv) x = u(rng);
            TestFunction f;
            for (int e = 0; e < m.edge_count(); ++e) {
                const double l = m.length(e), om = w(rng) / l;
                const double f0 = fv[m.graph().edge(e).u], f1 = fv[m.graph().edge(e).v];
                const double c = u(rng), a = f0 - c;
                const double b = (f1 - c - a * std::cos(om * l)) / std::sin(om * l);
                f.edges.push_back({TrigSegment{0, l, c, a, b, om}});
            }
            EXPECT_GE(rayleigh_centered(m, f), k1 * k1 * (1 - 1e-10));
        }
    }
}

TEST(Composite, MatchesClosedFormAtFiniteLength) {
    // d1 = d2 = 2: a single edge of length le just shifts phase.
    CMatrix s = composite_vertex_scattering(2, 2, 3.0, 0.4);
    EXPECT_NEAR(std::abs(s(1, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(s(0, 0)), 0.0, 1e-12);
    EXPECT_NEAR(std::arg(s(1, 0) / std::exp(cplx(0, 1.2))), 0.0, 1e-12);
    CMatrix t = composite_vertex_scattering(3, 4, 2.0, 0.3);
    EXPECT_LT((t.adjoint() * t - CMatrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Spectrum, RejectsBadInput) {
    MetricGraph m = equilateral(families::star(3));
    EXPECT_THROW(eigenvalues(m, -1), InvalidInputError);
    EXPECT_THROW(secular_value(m, 0), InvalidInputError);
}
