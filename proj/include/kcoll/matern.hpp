#ifndef KCOLL_MATERN_HPP
#define KCOLL_MATERN_HPP

#include "kcoll/elliptic.hpp"
#include "kcoll/types.hpp"

namespace kcoll {

/// Matern kernel reproducing H^tau(R^d), shape-scaled by eps:
///   Phi(x, y) = C * g_nu(eps * |x - y|),  g_nu(s) = s^nu K_nu(s),
/// with nu = tau - d/2 and C = 2^(1-nu) / Gamma(nu), so Phi(x, x) = 1.
class MaternSpec {
public:
    MaternSpec(int tau, int dim, double eps);

    int tau() const { return tau_; }
    int dim() const { return dim_; }
    double eps() const { return eps_; }
    double nu() const { return nu_; }
    double norm_c() const { return norm_c_; }
    bool half_integer() const { return half_; }

private:
    int tau_;
    int dim_;
    double eps_;
    double nu_;
    double norm_c_;
    bool half_;
};

/// Beyond this scaled distance e^{-s} underflows; kernel and derivatives are 0.
inline constexpr double kUnderflowCutoff = 700.0;

/// Radial pieces of the kernel at distance r, d = x - y:
///   Phi = value,  grad Phi = psi1 * d,  Hess Phi = psi1 * I + psi2 * d d^T.
struct RadialTerms {
    double value = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
};

/// `derivs` selects how many of (value, psi1, psi2) beyond value are needed (0..2).
RadialTerms matern_radial(const MaternSpec& spec, double r, int derivs = 2);

struct KernelJet {
    double value = 0.0;
    Point gradient;      // per unit length
    SmallMatrix hessian; // per unit length squared
};

template <typename DerivedX, typename DerivedY>
double matern_eval(const MaternSpec& spec, const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
    return matern_radial(spec, (x - y).norm(), 0).value;
}

template <typename DerivedX, typename DerivedY>
KernelJet matern_jet(const MaternSpec& spec, const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
    require(spec.nu() >= 2.0, "matern_jet: kernel order nu must be >= 2");
    const Point d = x - y;
    const RadialTerms t = matern_radial(spec, d.norm(), 2);
    KernelJet jet;
    jet.value = t.value;
    jet.gradient = t.psi1 * d;
    jet.hessian = t.psi1 * SmallMatrix::Identity(d.size(), d.size()) + t.psi2 * d * d.transpose();
    return jet;
}

/// L Phi(., y) evaluated at x with coefficients already frozen at x.
template <typename DerivedX, typename DerivedY>
double apply_elliptic(const MaternSpec& spec, const OperatorCoefficients& coef, const Eigen::MatrixBase<DerivedX>& x,
                      const Eigen::MatrixBase<DerivedY>& y)
{
    const Point d = x - y;
    const RadialTerms t = matern_radial(spec, d.norm(), 2);
    return t.psi1 * (coef.a.trace() - coef.b.dot(d)) + t.psi2 * d.dot(coef.a * d) - coef.c * t.value;
}

template <typename DerivedX, typename DerivedY>
double apply_elliptic(const MaternSpec& spec, const EllipticOperator& op, const Eigen::MatrixBase<DerivedX>& x,
                      const Eigen::MatrixBase<DerivedY>& y)
{
    require(spec.nu() >= 2.0, "apply_elliptic: kernel order nu must be >= 2");
    return apply_elliptic(spec, op.at(x), x, y);
}

} // namespace kcoll

#endif // KCOLL_MATERN_HPP
