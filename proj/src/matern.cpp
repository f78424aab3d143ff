#include "kcoll/matern.hpp"

#include "kcoll/bessel.hpp"

#include <array>
#include <cmath>

namespace kcoll {

MaternSpec::MaternSpec(int tau, int dim, double eps) : tau_(tau), dim_(dim), eps_(eps)
{
    require(dim >= 1 && dim <= kMaxDim, "MaternSpec: dim must be 1, 2 or 3");
    require(eps > 0.0 && std::isfinite(eps), "MaternSpec: shape parameter must be positive");
    nu_ = tau - 0.5 * dim;
    require(nu_ > 0.0, "MaternSpec: tau must exceed dim/2");
    half_ = (dim % 2) == 1;
    norm_c_ = std::pow(2.0, 1.0 - nu_) / std::tgamma(nu_);
}

RadialTerms matern_radial(const MaternSpec& spec, double r, int derivs)
{
    RadialTerms t;
    const double s = spec.eps() * r;
    if (s > kUnderflowCutoff) {
        return t;
    }
    const auto count = static_cast<std::size_t>(std::floor(spec.nu())) + 1;
    std::array<double, 32> g{};
    require(count <= g.size(), "matern_radial: kernel order too large");
    radial_profile_ladder(spec.half_integer(), s, std::span<double>(g.data(), count));

    const double c = spec.norm_c();
    const double e2 = spec.eps() * spec.eps();
    // C is chosen so that Phi(0) = 1; pin it instead of trusting the rounding
    t.value = r == 0.0 ? 1.0 : c * g[count - 1];
    if (derivs >= 1 && count >= 2) {
        t.psi1 = -c * e2 * g[count - 2];
    }
    if (derivs >= 2 && count >= 3 && r > 0.0) {
        t.psi2 = c * e2 * e2 * g[count - 3];
    }
    return t;
}

EllipticOperator EllipticOperator::modified_helmholtz(int dim)
{
    return {[dim](const Point&) { return SmallMatrix(SmallMatrix::Identity(dim, dim)); },
            [dim](const Point&) { return Point(Point::Zero(dim)); }, [](const Point&) { return 1.0; }};
}

EllipticOperator EllipticOperator::identity(int dim)
{
    return {[dim](const Point&) { return SmallMatrix(SmallMatrix::Zero(dim, dim)); },
            [dim](const Point&) { return Point(Point::Zero(dim)); }, [](const Point&) { return -1.0; }};
}

EllipticOperator EllipticOperator::divergence_form(int dim, std::function<double(const Point&)> k,
                                                   std::function<Point(const Point&)> grad_k)
{
    // div(k grad u) = k Laplace(u) + grad k . grad u, so a = k I and b = -grad k.
    return {[dim, k](const Point& x) { return SmallMatrix(k(x) * SmallMatrix::Identity(dim, dim)); },
            [grad_k](const Point& x) { return Point(-grad_k(x)); }, [](const Point&) { return 0.0; }};
}

} // namespace kcoll
