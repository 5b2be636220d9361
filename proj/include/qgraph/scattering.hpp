#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/graph.hpp"

namespace qgraph {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// d x d vertex scattering matrix at wavenumber k > 0:
/// -I + 2 / (d + i alpha / k) * ones, written with cos/sin of theta/2 so
/// that the Dirichlet case needs no special value of alpha.
inline CMatrix vertex_scattering(const VertexCondition& c, int d, double k) {
    CMatrix s = -CMatrix::Identity(d, d);
    const double ch = c.cos_half();
    if (ch == 0) return s;
    const cplx coef = 2.0 * ch * k / cplx(d * ch * k, c.sin_half());
    s.array() += coef;
    return s;
}

/// Bond scattering matrix U(k) = exp(ikL) J Sigma acting on the vector of
/// incoming amplitudes a_b^in, with bond b of edge e equal to e or e + E.
class BondScattering {
public:
    explicit BondScattering(const MetricGraph& m) : m_(&m) {}

    int dimension() const { return m_->graph().bond_count(); }

    /// Block diagonal Sigma in bond indexing: entry (b, c) couples bonds with a common origin.
    CMatrix sigma(double k) const {
        const DiscreteGraph& g = m_->graph();
        CMatrix s = CMatrix::Zero(dimension(), dimension());
        for (int v = 0; v < g.vertex_count(); ++v) {
            const auto& bonds = g.bonds_from(v);
            CMatrix block = vertex_scattering(m_->condition(v), static_cast<int>(bonds.size()), k);
            for (std::size_t i = 0; i < bonds.size(); ++i)
                for (std::size_t j = 0; j < bonds.size(); ++j) s(bonds[i], bonds[j]) = block(i, j);
        }
        return s;
    }

    CMatrix matrix(double k) const {
        const DiscreteGraph& g = m_->graph();
        const int n = dimension();
        CMatrix s = sigma(k);
        CMatrix u(n, n);
        for (int b = 0; b < n; ++b) {
            const cplx phase = std::exp(cplx(0, k * m_->length(g.bond_edge(b))));
            u.row(b) = phase * s.row(g.reverse(b));
        }
        return u;
    }

private:
    const MetricGraph* m_;
};

/// Singular values of I - U(k), ascending.
inline Eigen::VectorXd secular_singular_values(const MetricGraph& m, double k) {
    BondScattering bs(m);
    CMatrix a = CMatrix::Identity(bs.dimension(), bs.dimension()) - bs.matrix(k);
    Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(a).singularValues();
    return sv.reverse();
}

/// Smallest singular value of I - U(k); vanishes exactly at eigenvalues k > 0.
inline double secular_value(const MetricGraph& m, double k) {
    if (!(k > 0)) throw InvalidInputError("secular value needs k > 0");
    return secular_singular_values(m, k)(0);
}

/// Singular values below this count toward an eigenspace.
inline double multiplicity_threshold(const MetricGraph& m) { return 1e-7 * m.graph().bond_count(); }

/// Scattering matrix of the composite vertex obtained from a Neumann edge of
/// length le joining vertices of degrees d1 and d2. Rows and columns list the
/// d1 - 1 outer bonds at the first vertex, then the d2 - 1 at the second.
inline CMatrix composite_vertex_scattering(int d1, int d2, double k, double le) {
    if (d1 < 2 || d2 < 2) throw InvalidInputError("composite vertex needs degrees of at least two");
    const int n1 = d1 - 1, n2 = d2 - 1, n = n1 + n2;
    CMatrix s1 = vertex_scattering(VertexCondition::neumann(), d1, k);
    CMatrix s2 = vertex_scattering(VertexCondition::neumann(), d2, k);
    const cplx z = std::exp(cplx(0, k * le));
    CMatrix out(n, n);
    for (int col = 0; col < n; ++col) {
        CVector a1 = CVector::Zero(n1), a2 = CVector::Zero(n2);
        if (col < n1) a1(col) = 1;
        else a2(col - n1) = 1;
        // p leaves the first vertex along the internal edge, q leaves the second.
        cplx alpha1 = (s1.row(n1).head(n1) * a1)(0);
        cplx alpha2 = (s2.row(n2).head(n2) * a2)(0);
        cplx r1 = s1(n1, n1), r2 = s2(n2, n2);
        cplx p = (alpha1 + r1 * z * alpha2) / (1.0 - r1 * r2 * z * z);
        cplx q = alpha2 + r2 * z * p;
        out.col(col).head(n1) = s1.topLeftCorner(n1, n1) * a1 + s1.col(n1).head(n1) * (z * q);
        out.col(col).tail(n2) = s2.topLeftCorner(n2, n2) * a2 + s2.col(n2).head(n2) * (z * p);
    }
    return out;
}

}  // namespace qgraph
