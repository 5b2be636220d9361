#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

/// Copy of m with the delta condition theta at v and Neumann elsewhere.
inline MetricGraph marked(const MetricGraph& m, int v, double theta) {
    if (v < 0 || v >= m.vertex_count()) throw InvalidInputError("marked vertex out of range");
    VertexConditionMap c(m.vertex_count(), VertexCondition::neumann());
    c[v] = VertexCondition::delta(theta);
    return MetricGraph(m.graph(), m.lengths(), c);
}

inline Spectrum spectrum_theta(const MetricGraph& m, int v, double theta, double k_max) {
    return eigenvalues(marked(m, v, theta), k_max);
}

namespace detail {

inline bool same_k(double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)); }

/// Multiset intersection of two sorted flat spectra.
inline std::vector<double> common_values(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r;
    std::size_t j = 0;
    for (double x : a) {
        while (j < b.size() && b[j] < x && !same_k(x, b[j])) ++j;
        if (j < b.size() && same_k(x, b[j])) {
            r.push_back(x);
            ++j;
        }
    }
    return r;
}

/// Removes from a flat spectrum the closest match of each flat value.
inline std::vector<double> remove_values(const std::vector<double>& s, const std::vector<double>& flat) {
    std::vector<char> removed(s.size(), 0);
    for (double x : flat) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(s.size()); ++i)
            if (!removed[i] && same_k(x, s[i]) && (best < 0 || std::abs(s[i] - x) < std::abs(s[best] - x))) best = i;
        if (best >= 0) removed[best] = 1;
    }
    std::vector<double> r;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!removed[i]) r.push_back(s[i]);
    return r;
}

}  // namespace detail

/// Sweeps of the delta parameter at one vertex. K is defined on (-pi, 3pi].
class Dispersion {
public:
    Dispersion(const MetricGraph& m, int v) : base_(marked(m, v, 0.0)), v_(v) {
        k_cap_ = 4 * pi / base_.total_length();
        while (true) {
            flat_ = detail::common_values(level_list(0.0, 1.5 * k_cap_), level_list(pi, 1.5 * k_cap_));
            auto rest = detail::remove_values(level_list(pi, k_cap_), flat_);
            if (rest.size() >= 2) break;
            k_cap_ *= 2;
        }
        std::vector<double> kept;
        for (double x : flat_)
            if (x <= 1.5 * k_cap_) kept.push_back(x);
        flat_ = kept;
    }

    int vertex() const { return v_; }
    const MetricGraph& graph() const { return base_; }
    /// Flat band values with multiplicity, as found up to the working cutoff.
    const std::vector<double>& flat_bands() const { return flat_; }
    double cutoff() const { return k_cap_; }

    /// Sorted eigenvalues at theta (signed k), repeated by multiplicity.
    std::vector<double> level_list(double theta, double k_max) const {
        return eigenvalues(marked(base_, v_, theta), k_max).flat();
    }

    std::vector<double> nonflat(double theta) const {
        return detail::remove_values(level_list(theta, k_cap_ * (1 + 1e-9)), flat_);
    }

    /// Dispersion relation for theta in (-pi, 3pi].
    double K(double theta) const {
        if (!(theta > -pi) || theta > 3 * pi) throw InvalidInputError("K is defined on (-pi, 3pi]");
        if (theta <= pi) return nonflat(theta).at(0);
        return nonflat(theta - 2 * pi).at(1);
    }

    bool in_flat_band(double k) const {
        return std::any_of(flat_.begin(), flat_.end(), [&](double x) { return detail::same_k(x, k); });
    }

private:
    MetricGraph base_;
    int v_;
    double k_cap_ = 0;
    std::vector<double> flat_;
};

struct DispersionCurve {
    int vertex = 0;
    std::vector<double> theta;
    /// levels[j][n] = k_n(theta_j), signed.
    std::vector<std::vector<double>> levels;
    /// K(theta_j) and K(theta_j + 2 pi).
    std::vector<double> branch_low, branch_high;
    std::vector<double> flat_bands;
};

/// Samples theta_j = -pi + 2 pi (j + 1) / grid, j = 0..grid-1.
inline DispersionCurve dispersion_curve(const MetricGraph& m, int v, int grid, int level_count = 6) {
    if (grid < 64) throw InvalidInputError("dispersion grid must have at least 64 points");
    if (level_count < 1) throw InvalidInputError("level count must be positive");
    Dispersion d(m, v);
    double k_max = d.cutoff();
    while (static_cast<int>(d.level_list(pi, k_max).size()) < level_count) k_max *= 2;
    DispersionCurve c;
    c.vertex = v;
    for (double x : detail::common_values(d.level_list(0.0, 1.5 * k_max), d.level_list(pi, 1.5 * k_max)))
        if (x <= k_max) c.flat_bands.push_back(x);
    c.theta.resize(grid);
    c.levels.resize(grid);
    c.branch_low.resize(grid);
    c.branch_high.resize(grid);
    parallel_for(grid, [&](int j) {
        const double th = j == grid - 1 ? pi : -pi + 2 * pi * (j + 1) / grid;
        c.theta[j] = th;
        auto all = d.level_list(th, k_max);
        all.resize(level_count);
        c.levels[j] = all;
        auto nf = d.nonflat(th);
        c.branch_low[j] = nf.at(0);
        c.branch_high[j] = nf.at(1);
    });
    return c;
}

enum class SgpClass { strong, obeys, violates };

inline std::string to_string(SgpClass c) {
    switch (c) {
        case SgpClass::strong: return "strong";
        case SgpClass::obeys: return "obeys";
        default: return "violates";
    }
}

struct SgpReport {
    double theta_sg = 0;
    SgpClass classification = SgpClass::violates;
    double gap = 0;               // k1 of the Neumann graph
    int neumann_multiplicity = 0;
    int dirichlet_multiplicity = 0;  // multiplicity of the same k with Dirichlet at v
    bool gap_in_flat_band = false;
    double residual = 0;          // K(theta_sg) - k1
};

inline SgpReport spectral_gap_parameter(const Dispersion& d) {
    SgpReport r;
    Eigenpair g = first_positive_eigenvalue(d.graph());
    r.gap = g.k;
    r.neumann_multiplicity = g.multiplicity;
    double lo = 0, hi = 2 * pi;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (d.K(mid) < r.gap - detail::root_tolerance(r.gap)) lo = mid;
        else hi = mid;
    }
    r.theta_sg = hi;
    r.residual = d.K(hi) - r.gap;
    r.gap_in_flat_band = d.in_flat_band(r.gap);
    r.dirichlet_multiplicity = eigenvalues(marked(d.graph(), d.vertex(), pi), r.gap * 1.01 + 1).multiplicity_of(r.gap);
    if (std::abs(r.theta_sg - pi) <= 1e-6 && r.dirichlet_multiplicity > r.neumann_multiplicity)
        r.classification = SgpClass::strong;
    else if (r.theta_sg <= pi + 1e-6)
        r.classification = SgpClass::obeys;
    else
        r.classification = SgpClass::violates;
    return r;
}

inline SgpReport spectral_gap_parameter(const MetricGraph& m, int v) { return spectral_gap_parameter(Dispersion(m, v)); }

/// Scales m1 by L and m2 by 1 - L and identifies v1 with v2. Vertex w of m2
/// becomes v1 if w == v2, else V1 + w minus one when w > v2.
inline MetricGraph glue(const MetricGraph& m1, int v1, const MetricGraph& m2, int v2, double L) {
    if (!(L >= 0 && L <= 1)) throw InvalidInputError("gluing parameter must lie in [0, 1]");
    if (v1 < 0 || v1 >= m1.vertex_count() || v2 < 0 || v2 >= m2.vertex_count())
        throw InvalidInputError("gluing vertex out of range");
    auto scaled = [](const MetricGraph& m, double s) {
        std::vector<double> l = m.lengths();
        const double t = m.total_length();
        for (double& x : l) x *= s / t;
        return MetricGraph(m.graph(), l, m.conditions());
    };
    if (L == 0) return scaled(m2, 1.0);
    if (L == 1) return scaled(m1, 1.0);
    const int V1 = m1.vertex_count();
    auto image = [&](int w) { return w == v2 ? v1 : V1 + w - (w > v2 ? 1 : 0); };
    std::vector<Edge> edges = m1.graph().edges();
    std::vector<double> lengths;
    for (double x : m1.lengths()) lengths.push_back(x * L / m1.total_length());
    for (const Edge& e : m2.graph().edges()) edges.push_back({image(e.u), image(e.v)});
    for (double x : m2.lengths()) lengths.push_back(x * (1 - L) / m2.total_length());
    VertexConditionMap c = m1.conditions();
    for (int w = 0; w < m2.vertex_count(); ++w)
        if (w != v2) c.push_back(m2.condition(w));
    c[v1] = VertexCondition::neumann();
    return MetricGraph(DiscreteGraph(V1 + m2.vertex_count() - 1, edges), lengths, c);
}

struct GluingReport {
    double gap1 = 0, gap2 = 0;
    double optimal_L = 0;
    double glued_gap = 0;
    int glued_multiplicity = 0;
    SgpReport sgp1, sgp2;
    bool subadditive = false;
    bool equality = false;
    bool length_condition = true;  // holds by construction at the optimal L
    bool theta_condition = false;  // theta1 + theta2 <= 2 pi
    bool gaps_in_flat_bands = false;
    /// Equality occurs exactly when both conditions hold, and then the
    /// necessary consequences hold as well.
    bool consistent = false;
};

inline GluingReport gluing_bound_check(const MetricGraph& m1, int v1, const MetricGraph& m2, int v2) {
    GluingReport r;
    r.sgp1 = spectral_gap_parameter(m1, v1);
    r.sgp2 = spectral_gap_parameter(m2, v2);
    r.gap1 = r.sgp1.gap;
    r.gap2 = r.sgp2.gap;
    r.optimal_L = r.gap1 / (r.gap1 + r.gap2);
    Eigenpair g = first_positive_eigenvalue(glue(m1, v1, m2, v2, r.optimal_L));
    r.glued_gap = g.k;
    r.glued_multiplicity = g.multiplicity;
    const double sum = r.gap1 + r.gap2;
    r.subadditive = r.glued_gap <= sum + 1e-8;
    r.equality = std::abs(r.glued_gap - sum) <= 1e-8 * std::max(1.0, sum);
    r.theta_condition = r.sgp1.theta_sg + r.sgp2.theta_sg <= 2 * pi + 1e-7;
    r.gaps_in_flat_bands = r.sgp1.gap_in_flat_band && r.sgp2.gap_in_flat_band;
    const bool predicted = r.length_condition && r.theta_condition;
    r.consistent = r.subadditive && r.equality == predicted &&
                   (!r.equality || (r.gaps_in_flat_bands && r.glued_multiplicity > 1));
    return r;
}

}  // namespace qgraph
