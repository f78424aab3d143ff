#include "kcoll/bessel.hpp"

#include "kcoll/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace kcoll {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kSqrtHalfPi = 1.2533141373155002512; // sqrt(pi/2)

std::pair<double, double> k01_series(double x)
{
    const double t = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    // I0, I1 and the harmonic-weighted tails
    double term0 = 1.0;  // t^k / (k!)^2
    double term1 = 1.0;  // t^k / (k! (k+1)!)
    double i0 = 1.0;
    double i1 = 1.0;
    double harmonic = 0.0; // H_k
    double tail0 = 0.0;    // sum H_k t^k / (k!)^2
    double tail1 = (2.0 * (-kEulerGamma) + 1.0) * term1; // (psi(1) + psi(2)) at k = 0
    for (int k = 1; k < 60; ++k) {
        term0 *= t / (static_cast<double>(k) * k);
        term1 *= t / (static_cast<double>(k) * (k + 1));
        harmonic += 1.0 / k;
        const double harmonic_next = harmonic + 1.0 / (k + 1);
        i0 += term0;
        i1 += term1;
        tail0 += harmonic * term0;
        tail1 += (2.0 * (-kEulerGamma) + harmonic + harmonic_next) * term1;
        if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1) {
            break;
        }
    }
    i1 *= 0.5 * x;
    const double k0 = -(log_half + kEulerGamma) * i0 + tail0;
    const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * tail1;
    return {k0, k1};
}

std::pair<double, double> k01_continued_fraction(double x)
{
    // Steed's method for CF2 (Temme), order zero.
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-17;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < kMaxIter; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) {
            break;
        }
    }
    h *= a1;
    const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    const double k1 = k0 * (x + 0.5 - h) / x;
    return {k0, k1};
}

} // namespace

bool supported_bessel_order(double mu)
{
    return mu >= 0.0 && std::isfinite(mu) && std::floor(2.0 * mu) == 2.0 * mu;
}

std::pair<double, double> bessel_k01(double s)
{
    require(s > 0.0, "bessel_k: argument must be positive");
    if (s <= 2.0) {
        return k01_series(s);
    }
    return k01_continued_fraction(s);
}

double bessel_k0(double s) { return bessel_k01(s).first; }
double bessel_k1(double s) { return bessel_k01(s).second; }

double bessel_k(double mu, double s)
{
    require(s > 0.0, "bessel_k: argument must be positive");
    require(supported_bessel_order(mu), "bessel_k: order must be a non-negative integer or half-integer");
    const bool half = std::floor(mu) != mu;
    double lower = 0.0;
    double upper = 0.0;
    double order = 0.0; // order of `lower`
    if (half) {
        lower = kSqrtHalfPi / std::sqrt(s) * std::exp(-s); // K_{1/2}
        upper = lower * (1.0 + 1.0 / s);                   // K_{3/2}
        order = 0.5;
    } else {
        std::tie(lower, upper) = bessel_k01(s);
        order = 0.0;
    }
    if (mu == order) {
        return lower;
    }
    while (order + 1.0 < mu) {
        // K_{m+1} = K_{m-1} + (2m/s) K_m, with m = order + 1
        const double next = lower + 2.0 * (order + 1.0) / s * upper;
        lower = upper;
        upper = next;
        order += 1.0;
    }
    return upper;
}

void radial_profile_ladder(bool half_integer, double s, std::span<double> out)
{
    if (out.empty()) {
        return;
    }
    const double s2 = s * s;
    double base = 0.0;
    if (half_integer) {
        const double g_half = kSqrtHalfPi * std::exp(-s);
        out[0] = g_half;
        if (out.size() > 1) {
            out[1] = g_half * (1.0 + s);
        }
        base = 0.5;
    } else {
        if (s == 0.0) {
            out[0] = std::numeric_limits<double>::infinity();
            if (out.size() > 1) {
                out[1] = 1.0;
            }
        } else {
            const auto [k0, k1] = bessel_k01(s);
            out[0] = k0;
            if (out.size() > 1) {
                out[1] = s * k1;
            }
        }
    }
    for (std::size_t k = 2; k < out.size(); ++k) {
        const double m = base + static_cast<double>(k) - 1.0;
        // at s = 0 the s^2 g_{m-1} term vanishes even when g_0 = inf
        const double tail = (s == 0.0) ? 0.0 : s2 * out[k - 2];
        out[k] = 2.0 * m * out[k - 1] + tail;
    }
}

double radial_profile(double mu, double s)
{
    require(s >= 0.0, "radial_profile: argument must be non-negative");
    require(supported_bessel_order(mu), "radial_profile: order must be a non-negative integer or half-integer");
    const bool half = std::floor(mu) != mu;
    const auto count = static_cast<std::size_t>(std::floor(mu)) + 1;
    double buf[64];
    require(count <= 64, "radial_profile: order too large");
    radial_profile_ladder(half, s, std::span<double>(buf, count));
    return buf[count - 1];
}

} // namespace kcoll
