#ifndef KCOLL_BESSEL_HPP
#define KCOLL_BESSEL_HPP

#include <span>
#include <utility>

namespace kcoll {

/// K_0(s) and K_1(s) together, s > 0.
///
/// Power series for s <= 2, Steed's continued fraction above. Both are
/// accurate to a few ulps over the range used by the kernels.
std::pair<double, double> bessel_k01(double s);

double bessel_k0(double s);
double bessel_k1(double s);

/// Modified Bessel function of the second kind for integer or half-integer
/// order mu >= 0. Integer orders recur upward from K_0, K_1; half-integer
/// orders from the closed forms of K_{1/2}, K_{3/2}.
double bessel_k(double mu, double s);

/// Radial profile g_mu(s) = s^mu K_mu(s), extended to s = 0 by its limit
/// 2^(mu-1) Gamma(mu) for mu > 0 (g_0(0) is +inf).
double radial_profile(double mu, double s);

/// Fills out[k] = g_{base + k}(s), base = 1/2 when `half_integer`, else 0,
/// with the stable recurrence g_{m+1} = 2m g_m + s^2 g_{m-1}.
void radial_profile_ladder(bool half_integer, double s, std::span<double> out);

/// True when 2*mu is a non-negative integer.
bool supported_bessel_order(double mu);

} // namespace kcoll

#endif // KCOLL_BESSEL_HPP
