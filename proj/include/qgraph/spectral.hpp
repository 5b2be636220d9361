#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/graph.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/scattering.hpp"

namespace qgraph {

/// Real eigenfunction stored per edge as f_e(x) = A_e cos(kx) + B_e sin(kx),
/// x measured from edge(e).u.
struct TrigFunction {
    double k = 0;
    std::vector<double> A, B;

    double value(int e, double x) const { return A[e] * std::cos(k * x) + B[e] * std::sin(k * x); }
    double derivative(int e, double x) const {
        return k * (-A[e] * std::sin(k * x) + B[e] * std::cos(k * x));
    }
};

namespace detail {

/// Integrals of cos^2, sin^2 and cos*sin of kx over [0, l].
struct TrigMoments {
    double cc, ss, cs;
};

inline TrigMoments trig_moments(double k, double l) {
    if (k == 0) return {l, 0, 0};
    const double s2 = std::sin(2 * k * l) / (4 * k);
    const double s = std::sin(k * l);
    return {l / 2 + s2, l / 2 - s2, s * s / (2 * k)};
}

inline double edge_inner(double k, double l, double a1, double b1, double a2, double b2) {
    TrigMoments t = trig_moments(k, l);
    return a1 * a2 * t.cc + (a1 * b2 + b1 * a2) * t.cs + b1 * b2 * t.ss;
}

}  // namespace detail

inline double l2_inner(const MetricGraph& m, const TrigFunction& f, const TrigFunction& g) {
    double s = 0;
    for (int e = 0; e < m.edge_count(); ++e)
        s += detail::edge_inner(f.k, m.length(e), f.A[e], f.B[e], g.A[e], g.B[e]);
    return s;
}

inline double l2_norm(const MetricGraph& m, const TrigFunction& f) { return std::sqrt(l2_inner(m, f, f)); }

inline double integral(const MetricGraph& m, const TrigFunction& f) {
    double s = 0;
    for (int e = 0; e < m.edge_count(); ++e) {
        const double l = m.length(e);
        if (f.k == 0) s += f.A[e] * l;
        else s += (f.A[e] * std::sin(f.k * l) + f.B[e] * (1 - std::cos(f.k * l))) / f.k;
    }
    return s;
}

/// Value of f at the origin of bond b.
inline double bond_value(const MetricGraph& m, const TrigFunction& f, int b) {
    const int E = m.edge_count();
    return b < E ? f.value(b, 0) : f.value(b - E, m.length(b - E));
}

/// Derivative of f at the origin of bond b, taken along b.
inline double bond_derivative(const MetricGraph& m, const TrigFunction& f, int b) {
    const int E = m.edge_count();
    return b < E ? f.derivative(b, 0) : -f.derivative(b - E, m.length(b - E));
}

/// Mean of the end values of f at v.
inline double vertex_value(const MetricGraph& m, const TrigFunction& f, int v) {
    const auto& bonds = m.graph().bonds_from(v);
    double s = 0;
    for (int b : bonds) s += bond_value(m, f, b);
    return s / static_cast<double>(bonds.size());
}

inline double derivative_sum(const MetricGraph& m, const TrigFunction& f, int v) {
    double s = 0;
    for (int b : m.graph().bonds_from(v)) s += bond_derivative(m, f, b);
    return s;
}

/// Exact maximum of |f| over the graph.
inline double sup_norm(const MetricGraph& m, const TrigFunction& f) {
    double best = 0;
    for (int e = 0; e < m.edge_count(); ++e) {
        const double l = m.length(e);
        best = std::max({best, std::abs(f.value(e, 0)), std::abs(f.value(e, l))});
        if (f.k == 0) continue;
        const double r = std::hypot(f.A[e], f.B[e]);
        const double phi = std::atan2(f.B[e], f.A[e]);
        // |f| peaks where kx - phi is a multiple of pi.
        const double n0 = std::ceil(-phi / pi);
        if ((n0 * pi + phi) / f.k <= l) best = std::max(best, r);
    }
    return best;
}

/// Zeros of f_e strictly inside (margin, l - margin), ascending.
inline std::vector<double> edge_zeros(const MetricGraph& m, const TrigFunction& f, int e, double margin) {
    std::vector<double> r;
    const double l = m.length(e);
    if (f.k == 0) return r;
    const double phi = std::atan2(f.B[e], f.A[e]);
    // f = R cos(kx - phi) vanishes at kx = phi + pi/2 + n pi.
    double n = std::ceil((-phi - pi / 2) / pi);
    for (;; n += 1) {
        const double x = (phi + pi / 2 + n * pi) / f.k;
        if (x >= l - margin) break;
        if (x > margin) r.push_back(x);
    }
    return r;
}

/// Amplitudes (a_b^in, a_b^out) on every bond: f_b(x) = a^in e^{-ikx} + a^out e^{ikx}
/// with x measured from the origin of b.
inline std::vector<std::pair<cplx, cplx>> bond_amplitudes(const MetricGraph& m, const TrigFunction& f) {
    const int E = m.edge_count();
    std::vector<std::pair<cplx, cplx>> r(2 * E);
    const cplx i(0, 1);
    for (int e = 0; e < E; ++e) {
        const double kl = f.k * m.length(e);
        const double a = f.A[e], b = f.B[e];
        r[e] = {(a + i * b) / 2.0, (a - i * b) / 2.0};
        const double ar = a * std::cos(kl) + b * std::sin(kl);
        const double br = a * std::sin(kl) - b * std::cos(kl);
        r[e + E] = {(ar + i * br) / 2.0, (ar - i * br) / 2.0};
    }
    return r;
}

struct Eigenpair {
    /// Signed wavenumber: k >= 0 for lambda = k^2 >= 0, k = -sqrt(-lambda) for negative lambda.
    double k = 0;
    int multiplicity = 0;
    /// Orthonormal real basis; filled on request.
    std::vector<TrigFunction> basis;

    double lambda() const { return k >= 0 ? k * k : -k * k; }
};

struct Spectrum {
    std::vector<Eigenpair> pairs;
    double k_max = 0;

    /// Eigenvalues repeated according to multiplicity.
    std::vector<double> flat() const {
        std::vector<double> r;
        for (const auto& p : pairs) r.insert(r.end(), p.multiplicity, p.k);
        return r;
    }

    /// First strictly positive eigenvalue, or nullptr.
    const Eigenpair* first_positive() const {
        for (const auto& p : pairs)
            if (p.k > 0) return &p;
        return nullptr;
    }

    int multiplicity_of(double k, double tol = 1e-7) const {
        for (const auto& p : pairs)
            if (std::abs(p.k - k) <= tol * std::max(1.0, std::abs(k))) return p.multiplicity;
        return 0;
    }
};

namespace detail {

struct FreeVertices {
    std::vector<int> index;  // -1 for Dirichlet vertices
    int count = 0;
};

inline FreeVertices free_vertices(const MetricGraph& m) {
    FreeVertices fv;
    fv.index.assign(m.vertex_count(), -1);
    for (int v = 0; v < m.vertex_count(); ++v)
        if (!m.condition(v).is_dirichlet()) fv.index[v] = fv.count++;
    return fv;
}

/// Edge piece of the vertex matrix; u and v are matrix rows, -1 for Dirichlet.
struct Segment {
    int u, v;
    double l;
    bool loop;
};

struct Segmentation {
    std::vector<Segment> segments;
    int size = 0;
};

/// Distance of k l / pi from the nearest positive integer, 0.5 if below one half.
inline double pole_gap(double k, double l) {
    const double x = k * l / pi;
    const double n = std::round(x);
    return n < 1 ? 0.5 : std::abs(x - n);
}

/// Edges whose Dirichlet spectrum is close to k are cut by a Neumann vertex
/// of degree two, which leaves the spectrum unchanged and keeps the vertex
/// matrix away from its poles.
inline Segmentation segments_at(const MetricGraph& m, const FreeVertices& fv, double k) {
    static constexpr double fractions[] = {0.381966011250105, 0.414213562373095, 0.318309886183791,
                                           0.276393202250021, 0.453397651516404, 0.236067977499790};
    Segmentation s;
    s.size = fv.count;
    const DiscreteGraph& g = m.graph();
    for (int e = 0; e < g.edge_count(); ++e) {
        const int u = fv.index[g.edge(e).u], v = fv.index[g.edge(e).v];
        const double l = m.length(e);
        if (pole_gap(k, l) >= 0.05) {
            s.segments.push_back({u, v, l, g.edge(e).is_loop()});
            continue;
        }
        double best = fractions[0], score = -1;
        for (double f : fractions) {
            const double sc = std::min(pole_gap(k, f * l), pole_gap(k, (1 - f) * l));
            if (sc > score) {
                score = sc;
                best = f;
            }
        }
        const int w = s.size++;
        s.segments.push_back({u, w, best * l, false});
        s.segments.push_back({w, v, (1 - best) * l, false});
    }
    return s;
}

/// Vertex matrix at wavenumber k: row v maps the vertex values F to
/// (sum of outgoing derivatives) - alpha_v F_v for the edgewise solutions.
inline Eigen::MatrixXd vertex_matrix(const MetricGraph& m, const FreeVertices& fv, const Segmentation& sg, double k) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(sg.size, sg.size);
    for (const Segment& sgm : sg.segments) {
        const int u = sgm.u, v = sgm.v;
        const double l = sgm.l;
        if (sgm.loop) {
            if (u >= 0) M(u, u) += 2 * k * std::tan(k * l / 2);
            continue;
        }
        const double c = std::cos(k * l), s = std::sin(k * l);
        if (u >= 0) M(u, u) -= k * c / s;
        if (v >= 0) M(v, v) -= k * c / s;
        if (u >= 0 && v >= 0) {
            M(u, v) += k / s;
            M(v, u) += k / s;
        }
    }
    for (int v = 0; v < m.vertex_count(); ++v)
        if (fv.index[v] >= 0) M(fv.index[v], fv.index[v]) -= m.condition(v).alpha();
    return M;
}

/// Same construction for lambda = -kappa^2, sign flipped so that the matrix
/// increases with kappa; kappa = 0 gives the weighted Laplacian plus alpha.
inline Eigen::MatrixXd hyperbolic_matrix(const MetricGraph& m, const FreeVertices& fv, double kappa) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(fv.count, fv.count);
    const DiscreteGraph& g = m.graph();
    for (int e = 0; e < g.edge_count(); ++e) {
        const int u = fv.index[g.edge(e).u], v = fv.index[g.edge(e).v];
        const double l = m.length(e);
        if (g.edge(e).is_loop()) {
            if (u >= 0 && kappa > 0) H(u, u) += 2 * kappa * std::tanh(kappa * l / 2);
            continue;
        }
        const double diag = kappa > 0 ? kappa / std::tanh(kappa * l) : 1 / l;
        const double off = kappa > 0 ? kappa / std::sinh(kappa * l) : 1 / l;
        if (u >= 0) H(u, u) += diag;
        if (v >= 0) H(v, v) += diag;
        if (u >= 0 && v >= 0) {
            H(u, v) -= off;
            H(v, u) -= off;
        }
    }
    for (int v = 0; v < m.vertex_count(); ++v)
        if (fv.index[v] >= 0) H(fv.index[v], fv.index[v]) += m.condition(v).alpha();
    return H;
}

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return Eigen::VectorXd();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace detail

/// Number of eigenvalues lambda_n < k^2 (negative and zero ones included),
/// as the edge Dirichlet count plus the positive index of the vertex matrix.
inline int eigenvalue_count_below(const MetricGraph& m, double k) {
    auto fv = detail::free_vertices(m);
    auto sg = detail::segments_at(m, fv, k);
    int count = 0;
    for (const auto& s : sg.segments) count += static_cast<int>(std::ceil(k * s.l / pi)) - 1;
    Eigen::VectorXd mu = detail::symmetric_eigenvalues(detail::vertex_matrix(m, fv, sg, k));
    for (int i = 0; i < mu.size(); ++i)
        if (mu(i) > 0) ++count;
    return count;
}

/// Eigenvalues lambda <= 0, found without the scattering matrix.
struct NonpositiveSpectrum {
    std::vector<Eigenpair> negative;  // ascending signed k
    int zero_multiplicity = 0;
    int count() const {
        int c = zero_multiplicity;
        for (const auto& p : negative) c += p.multiplicity;
        return c;
    }
};

inline NonpositiveSpectrum nonpositive_spectrum(const MetricGraph& m) {
    NonpositiveSpectrum r;
    auto fv = detail::free_vertices(m);
    if (fv.count == 0) return r;
    Eigen::MatrixXd H0 = detail::hyperbolic_matrix(m, fv, 0);
    const double scale = std::max(1.0, H0.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    Eigen::VectorXd mu0 = detail::symmetric_eigenvalues(H0);
    int negatives = 0;
    for (int i = 0; i < mu0.size(); ++i) {
        if (mu0(i) < -tol) ++negatives;
        else if (mu0(i) <= tol) ++r.zero_multiplicity;
    }
    std::vector<double> ks;
    for (int j = 0; j < negatives; ++j) {
        auto f = [&](double kappa) { return detail::symmetric_eigenvalues(detail::hyperbolic_matrix(m, fv, kappa))(j); };
        double lo = 0, hi = 1;
        while (f(hi) < 0 && hi < 1e12) {
            lo = hi;
            hi *= 2;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (f(mid) < 0 ? lo : hi) = mid;
        }
        ks.push_back(-0.5 * (lo + hi));
    }
    std::sort(ks.begin(), ks.end());
    for (double k : ks) {
        if (!r.negative.empty() && std::abs(r.negative.back().k - k) <= 1e-10 * std::abs(k))
            ++r.negative.back().multiplicity;
        else
            r.negative.push_back({k, 1, {}});
    }
    return r;
}

/// Scan step of the spectral search.
inline double scan_step(const MetricGraph& m) {
    return pi / (16 * m.total_length() * std::max(1, m.edge_count()));
}

namespace detail {

inline double root_tolerance(double k) { return 2e-14 * std::max(1.0, k); }

/// Bisects [a, b] on the counting function until every jump is confined to
/// an interval below the root tolerance.
inline void isolate(const MetricGraph& m, double a, double b, int na, int nb,
                    std::vector<std::pair<double, int>>& out) {
    if (nb <= na) return;
    const double mid = 0.5 * (a + b);
    if (b - a <= root_tolerance(b) || mid <= a || mid >= b) {
        out.push_back({mid, nb - na});
        return;
    }
    int nm = std::clamp(eigenvalue_count_below(m, mid), na, nb);
    isolate(m, a, mid, na, nm, out);
    isolate(m, mid, b, nm, nb, out);
}

inline void merge_close_roots(std::vector<std::pair<double, int>>& roots) {
    std::sort(roots.begin(), roots.end());
    std::vector<std::pair<double, int>> merged;
    for (auto r : roots) {
        if (!merged.empty() && r.first - merged.back().first <= 1e-10 * std::max(1.0, r.first)) {
            auto& last = merged.back();
            last.first = (last.first * last.second + r.first * r.second) / (last.second + r.second);
            last.second += r.second;
        } else {
            merged.push_back(r);
        }
    }
    roots = std::move(merged);
}

}  // namespace detail

/// Orthonormal real basis of the eigenspace at k.
inline std::vector<TrigFunction> eigenfunctions(const MetricGraph& m, double k, int multiplicity_hint = 0);

/// All eigenvalues up to k_max, with multiplicity. Eigenvalues lambda <= 0
/// come first (k = 0 for the constants of a Neumann graph).
inline Spectrum eigenvalues(const MetricGraph& m, double k_max, bool with_basis = false) {
    if (!(k_max > 0)) throw InvalidInputError("k_max must be positive");
    const double step = scan_step(m);
    if (k_max / step > 5e6) throw ResourceError("k_max too large for the scan budget");
    Spectrum s;
    s.k_max = k_max;
    NonpositiveSpectrum np = nonpositive_spectrum(m);
    s.pairs = np.negative;
    if (np.zero_multiplicity > 0) s.pairs.push_back({0.0, np.zero_multiplicity, {}});
    const int base = np.count();

    const double end = k_max * (1 + 1e-12) + 1e-12;
    std::vector<double> grid{0.0};
    for (double t = step; t < end; t += step) grid.push_back(t);
    grid.push_back(end);
    const int cells = static_cast<int>(grid.size()) - 1;
    std::vector<int> counts(grid.size());
    counts[0] = base;
    parallel_for(cells, [&](int i) { counts[i + 1] = eigenvalue_count_below(m, grid[i + 1]); });
    for (int i = 1; i <= cells; ++i) counts[i] = std::max(counts[i], counts[i - 1]);
    std::vector<std::vector<std::pair<double, int>>> found(cells);
    parallel_for(cells, [&](int i) {
        if (counts[i + 1] > counts[i])
            detail::isolate(m, grid[i], grid[i + 1], counts[i], counts[i + 1], found[i]);
    });
    std::vector<std::pair<double, int>> roots;
    for (auto& f : found) roots.insert(roots.end(), f.begin(), f.end());
    detail::merge_close_roots(roots);
    for (auto [k, mult] : roots) s.pairs.push_back({k, mult, {}});
    if (with_basis)
        for (auto& p : s.pairs)
            if (p.k > 0) p.basis = eigenfunctions(m, p.k, p.multiplicity);
    return s;
}

/// Smallest eigenvalue k > 0 and its multiplicity.
inline Eigenpair first_positive_eigenvalue(const MetricGraph& m, bool with_basis = false) {
    const int base = nonpositive_spectrum(m).count();
    const double step = 8 * scan_step(m);
    double a = 0, b = step;
    int nb = eigenvalue_count_below(m, b);
    while (nb <= base) {
        a = b;
        b += step;
        if (b > 1e7) throw ResourceError("no positive eigenvalue found");
        nb = eigenvalue_count_below(m, b);
    }
    // Shrink onto the lowest jump.
    while (b - a > detail::root_tolerance(b)) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const int nm = eigenvalue_count_below(m, mid);
        if (nm > base) {
            b = mid;
            nb = nm;
        } else {
            a = mid;
        }
    }
    Eigenpair p{0.5 * (a + b), nb - base, {}};
    // Rounding can separate the copies of a degenerate root; collect them.
    p.multiplicity = eigenvalue_count_below(m, p.k + 1e-10 * std::max(1.0, p.k)) - base;
    if (with_basis) p.basis = eigenfunctions(m, p.k, p.multiplicity);
    return p;
}

inline double spectral_gap(const MetricGraph& m) { return first_positive_eigenvalue(m).k; }

namespace detail {

/// Real and imaginary parts of complex edge coefficients, reduced to an
/// L2-orthonormal basis of their span.
inline std::vector<TrigFunction> real_basis(const MetricGraph& m, double k,
                                            const std::vector<std::vector<cplx>>& A,
                                            const std::vector<std::vector<cplx>>& B, int keep) {
    const int E = m.edge_count();
    std::vector<TrigFunction> cand;
    for (std::size_t j = 0; j < A.size(); ++j) {
        TrigFunction re{k, std::vector<double>(E), std::vector<double>(E)};
        TrigFunction im = re;
        for (int e = 0; e < E; ++e) {
            re.A[e] = A[j][e].real();
            re.B[e] = B[j][e].real();
            im.A[e] = A[j][e].imag();
            im.B[e] = B[j][e].imag();
        }
        cand.push_back(re);
        cand.push_back(im);
    }
    const int n = static_cast<int>(cand.size());
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) G(i, j) = G(j, i) = l2_inner(m, cand[i], cand[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double top = es.eigenvalues()(n - 1);
    std::vector<TrigFunction> basis;
    for (int c = n - 1; c >= 0 && static_cast<int>(basis.size()) < keep; --c) {
        const double lam = es.eigenvalues()(c);
        if (!(lam > 1e-12 * top)) break;
        TrigFunction f{k, std::vector<double>(E, 0.0), std::vector<double>(E, 0.0)};
        for (int i = 0; i < n; ++i) {
            const double w = es.eigenvectors()(i, c) / std::sqrt(lam);
            for (int e = 0; e < E; ++e) {
                f.A[e] += w * cand[i].A[e];
                f.B[e] += w * cand[i].B[e];
            }
        }
        double big = 0, sign = 1;
        for (int e = 0; e < E; ++e)
            for (double x : {f.A[e], f.B[e]})
                if (std::abs(x) > big * (1 + 1e-9)) {
                    big = std::abs(x);
                    sign = x < 0 ? -1 : 1;
                }
        for (int e = 0; e < E; ++e) {
            f.A[e] *= sign;
            f.B[e] *= sign;
        }
        basis.push_back(std::move(f));
    }
    return basis;
}

}  // namespace detail

inline std::vector<TrigFunction> eigenfunctions(const MetricGraph& m, double k, int multiplicity_hint) {
    const int E = m.edge_count();
    if (std::abs(k) < 1e-12) {
        if (!m.all_neumann()) throw NotApplicableError("zero-mode basis is only built for Neumann graphs");
        TrigFunction f{0.0, std::vector<double>(E, 1 / std::sqrt(m.total_length())), std::vector<double>(E, 0.0)};
        return {f};
    }
    if (k < 0) throw NotApplicableError("eigenfunctions of negative eigenvalues are not built");
    BondScattering bs(m);
    const int n = bs.dimension();
    CMatrix a = CMatrix::Identity(n, n) - bs.matrix(k);
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thr = multiplicity_threshold(m);
    int mult = 0;
    for (int i = 0; i < n; ++i)
        if (sv(i) < thr) ++mult;
    if (mult == 0) throw NoEigenspaceError("k is not an eigenvalue");
    if (multiplicity_hint > 0) mult = std::min(multiplicity_hint, n);
    CMatrix sigma = bs.sigma(k);
    std::vector<std::vector<cplx>> As, Bs;
    const cplx i(0, 1);
    for (int j = 0; j < mult; ++j) {
        CVector ain = svd.matrixV().col(n - 1 - j);
        CVector aout = sigma * ain;
        std::vector<cplx> A(E), B(E);
        for (int e = 0; e < E; ++e) {
            A[e] = ain(e) + aout(e);
            B[e] = i * (aout(e) - ain(e));
        }
        As.push_back(std::move(A));
        Bs.push_back(std::move(B));
    }
    auto basis = detail::real_basis(m, k, As, Bs, mult);
    if (basis.empty()) throw NoEigenspaceError("eigenspace collapsed to zero");
    return basis;
}

/// Spectral gap k1 with its eigenspace basis.
inline Eigenpair gap_eigenpair(const MetricGraph& m) { return first_positive_eigenvalue(m, true); }

/// Piece c + a cos(omega x) + b sin(omega x) on [x0, x1] of an edge.
struct TrigSegment {
    double x0 = 0, x1 = 0;
    double c = 0, a = 0, b = 0, omega = 0;

    double value(double x) const { return c + a * std::cos(omega * x) + b * std::sin(omega * x); }
    double derivative(double x) const { return omega * (-a * std::sin(omega * x) + b * std::cos(omega * x)); }

    double integral() const {
        if (omega == 0) return (c + a) * (x1 - x0);
        return c * (x1 - x0) + (a * (std::sin(omega * x1) - std::sin(omega * x0)) -
                                b * (std::cos(omega * x1) - std::cos(omega * x0))) / omega;
    }

    double square_integral() const {
        const double d = x1 - x0;
        if (omega == 0) return (c + a) * (c + a) * d;
        const double w = omega;
        const double icos = (std::sin(w * x1) - std::sin(w * x0)) / w;
        const double isin = -(std::cos(w * x1) - std::cos(w * x0)) / w;
        const double h = (std::sin(2 * w * x1) - std::sin(2 * w * x0)) / (4 * w);
        const double icc = d / 2 + h, iss = d / 2 - h;
        const double ics = (std::pow(std::sin(w * x1), 2) - std::pow(std::sin(w * x0), 2)) / (2 * w);
        return c * c * d + a * a * icc + b * b * iss + 2 * a * c * icos + 2 * b * c * isin + 2 * a * b * ics;
    }

    double derivative_square_integral() const {
        if (omega == 0) return 0;
        const double d = x1 - x0, w = omega;
        const double h = (std::sin(2 * w * x1) - std::sin(2 * w * x0)) / (4 * w);
        const double icc = d / 2 + h, iss = d / 2 - h;
        const double ics = (std::pow(std::sin(w * x1), 2) - std::pow(std::sin(w * x0), 2)) / (2 * w);
        return w * w * (a * a * iss + b * b * icc - 2 * a * b * ics);
    }
};

/// Continuous, piecewise trigonometric test function.
struct TestFunction {
    std::vector<std::vector<TrigSegment>> edges;

    static TestFunction from(const MetricGraph& m, const TrigFunction& f) {
        TestFunction t;
        for (int e = 0; e < m.edge_count(); ++e)
            t.edges.push_back({TrigSegment{0, m.length(e), 0, f.A[e], f.B[e], f.k}});
        return t;
    }

    static TestFunction constant(const MetricGraph& m, double c) {
        TestFunction t;
        for (int e = 0; e < m.edge_count(); ++e) t.edges.push_back({TrigSegment{0, m.length(e), c, 0, 0, 0}});
        return t;
    }
};

namespace detail {

struct RayleighParts {
    double energy = 0, mass = 0, mean = 0;
};

inline RayleighParts rayleigh_parts(const MetricGraph& m, const TestFunction& f) {
    const DiscreteGraph& g = m.graph();
    if (static_cast<int>(f.edges.size()) != m.edge_count()) throw InvalidInputError("test function edge count mismatch");
    double scale = 0;
    for (const auto& segs : f.edges)
        for (const auto& s : segs) scale = std::max({scale, std::abs(s.c) + std::abs(s.a) + std::abs(s.b)});
    const double tol = 1e-9 * std::max(scale, 1e-300);
    std::vector<std::vector<double>> at_vertex(g.vertex_count());
    RayleighParts r;
    for (int e = 0; e < m.edge_count(); ++e) {
        const auto& segs = f.edges[e];
        const double l = m.length(e);
        if (segs.empty()) throw InvalidInputError("edge without segments");
        if (std::abs(segs.front().x0) > 1e-12 * l || std::abs(segs.back().x1 - l) > 1e-12 * l)
            throw InvalidInputError("segments must cover each edge");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (i > 0) {
                if (std::abs(segs[i].x0 - segs[i - 1].x1) > 1e-12 * l) throw InvalidInputError("segments must be contiguous");
                if (std::abs(segs[i].value(segs[i].x0) - segs[i - 1].value(segs[i - 1].x1)) > tol)
                    throw InvalidInputError("test function is discontinuous inside an edge");
            }
            r.energy += segs[i].derivative_square_integral();
            r.mass += segs[i].square_integral();
            r.mean += segs[i].integral();
        }
        at_vertex[g.edge(e).u].push_back(segs.front().value(0));
        at_vertex[g.edge(e).v].push_back(segs.back().value(l));
    }
    for (const auto& vals : at_vertex)
        for (double x : vals)
            if (std::abs(x - vals.front()) > tol) throw InvalidInputError("test function is discontinuous at a vertex");
    if (!(r.mass > 0) || scale == 0) throw InvalidInputError("zero test function");
    return r;
}

}  // namespace detail

/// Integral of f'^2 over integral of f^2.
inline double rayleigh(const MetricGraph& m, const TestFunction& f) {
    auto p = detail::rayleigh_parts(m, f);
    return p.energy / p.mass;
}

/// Rayleigh quotient of f minus its mean value.
inline double rayleigh_centered(const MetricGraph& m, const TestFunction& f) {
    auto p = detail::rayleigh_parts(m, f);
    const double denom = p.mass - p.mean * p.mean / m.total_length();
    if (!(denom > 1e-14 * p.mass)) throw InvalidInputError("test function is constant");
    return p.energy / denom;
}

}  // namespace qgraph
