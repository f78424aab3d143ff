#ifndef KCOLL_ELLIPTIC_HPP
#define KCOLL_ELLIPTIC_HPP

#include "kcoll/types.hpp"

#include <functional>

namespace kcoll {

/// Coefficients of L u = sum a_ij u_ij - sum b_i u_i - c u frozen at one point.
struct OperatorCoefficients {
    SmallMatrix a;
    Point b;
    double c = 0.0;
};

/// Second-order operator L u = sum a_ij d_ij u - sum b_i d_i u - c u.
/// Note the minus signs on the first- and zeroth-order terms.
struct EllipticOperator {
    std::function<SmallMatrix(const Point&)> a;
    std::function<Point(const Point&)> b;
    std::function<double(const Point&)> c;

    OperatorCoefficients at(const Point& x) const { return {a(x), b(x), c(x)}; }

    /// a = I, b = 0, c = 1, i.e. L u = Laplace(u) - u.
    static EllipticOperator modified_helmholtz(int dim);

    /// a = 0, b = 0, c = -1, i.e. L u = u.
    static EllipticOperator identity(int dim);

    /// div(k grad u) written out as k Laplace(u) + grad k . grad u.
    static EllipticOperator divergence_form(int dim, std::function<double(const Point&)> k,
                                            std::function<Point(const Point&)> grad_k);
};

} // namespace kcoll

#endif // KCOLL_ELLIPTIC_HPP
