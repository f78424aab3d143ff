#include "kcoll/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kcoll {

LstsqResult solve_lstsq(const Matrix& design, const Vector& rhs)
{
    const Eigen::Index m = design.rows();
    const Eigen::Index n = design.cols();
    require(n >= 1, "solve_lstsq: empty design matrix");
    require(m >= n, "solve_lstsq: system must not be underdetermined (rows >= cols)");
    require(rhs.size() == m, "solve_lstsq: rhs length must match the row count");
    require(design.allFinite() && rhs.allFinite(), "solve_lstsq: non-finite entries");

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(kTruncationThreshold);

    LstsqResult out;
    out.rank_estimate = qr.rank();
    out.truncated = out.rank_estimate < n;
    out.coeffs = qr.solve(rhs);
    out.residual_norm = (design * out.coeffs - rhs).norm();
    return out;
}

double cond2(const Matrix& m)
{
    require(m.size() > 0, "cond2: empty matrix");
    Eigen::BDCSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    const double smax = s[0];
    const double smin = s[s.size() - 1];
    require(smax > 0.0, "cond2: zero matrix");
    if (smin < std::numeric_limits<double>::epsilon() * smax) {
        return std::numeric_limits<double>::infinity();
    }
    return smax / smin;
}

namespace {

bool nearly_symmetric(const Matrix& g)
{
    const double scale = g.cwiseAbs().maxCoeff();
    return (g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (scale > 0.0 ? scale : 1.0);
}

} // namespace

Vector gen_eigenvalues(const Matrix& g1, const Matrix& g2)
{
    require(g1.rows() == g1.cols() && g2.rows() == g2.cols() && g1.rows() == g2.rows() && g1.rows() > 0,
            "gen_eig_extremes: matrices must be square and of equal size");
    require(g1.allFinite() && g2.allFinite(), "gen_eig_extremes: non-finite entries");
    require(nearly_symmetric(g1) && nearly_symmetric(g2), "gen_eig_extremes: matrices must be symmetric");

    const Eigen::Index n = g2.rows();
    Eigen::LLT<Matrix> llt(g2.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
        Matrix jittered = g2;
        jittered.diagonal().array() += 1e-12 * g2.trace() / static_cast<double>(n);
        llt.compute(jittered);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("gen_eig_extremes: second matrix is not positive definite");
        }
    }
    // L^{-1} G1 L^{-T}
    Matrix c = llt.matrixL().solve(g1);
    c = llt.matrixL().solve(c.transpose()).transpose();
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("gen_eig_extremes: eigensolver did not converge");
    }
    return es.eigenvalues();
}

std::pair<double, double> gen_eig_extremes(const Matrix& g1, const Matrix& g2)
{
    const Vector ev = gen_eigenvalues(g1, g2);
    return {std::max(ev[0], 0.0), ev[ev.size() - 1]};
}

} // namespace kcoll
