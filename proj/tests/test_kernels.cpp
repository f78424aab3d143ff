#include "kcoll/bessel.hpp"
#include "kcoll/matern.hpp"
#include "kcoll/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace kcoll;

namespace {

// K_mu(s) = int_0^inf exp(-s cosh t) cosh(mu t) dt. The integrand is even and
// analytic, so the trapezoid rule on [0, T] converges geometrically.
double bessel_k_integral(double mu, double s)
{
    const double t_max = std::acosh(800.0 / s + 1.0) + 1.0;
    const double dt = 1e-3;
    double sum = 0.5 * std::exp(-s);
    for (double t = dt; t < t_max; t += dt) {
        sum += std::exp(-s * std::cosh(t)) * std::cosh(mu * t);
    }
    return sum * dt;
}

struct Frozen {
    double mu;
    double s;
    double value;
};

// 20-digit values from an arbitrary-precision library
const std::vector<Frozen> kFrozen = {
    {0.0, 1.0, 0.42102443824070833334},     {1.0, 1.0, 0.60190723019723457474},
    {3.0, 1.0, 7.101262824737944506},       {0.0, 0.01, 4.7212447301610949443},
    {1.0, 0.01, 99.973894118296245561},     {0.0, 10.0, 1.7780062316167651811e-5},
    {1.0, 10.0, 1.8648773453825584597e-5},  {0.0, 2.0, 0.11389387274953343565},
    {1.0, 2.0, 0.13986588181652242728},     {0.0, 1e-6, 13.931442073626419459},
    {1.0, 1e-6, 999999.99999278432422},     {0.0, 50.0, 3.4101677497894955139e-23},
    {1.0, 50.0, 3.4441022267175556126e-23}, {2.5, 1.7, 0.66778199961173977881},
    {5.0, 0.3, 157139.1233712167135},       {0.0, 0.5, 0.92441907122766586178},
    {1.0, 3.7, 0.017628035102223263065},
};

Point random_point(Rng& rng, int d, double lo = -1.0, double hi = 1.0)
{
    Point p(d);
    for (int k = 0; k < d; ++k) {
        p[k] = rng.uniform(lo, hi);
    }
    return p;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_CASE("bessel K against frozen high-precision values")
{
    for (const Frozen& f : kFrozen) {
        CAPTURE(f.mu);
        CAPTURE(f.s);
        CHECK(rel_err(bessel_k(f.mu, f.s), f.value) < 1e-13);
    }
}

TEST_CASE("bessel K against the integral representation")
{
    for (double mu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 5.0}) {
        for (double s : {1e-3, 0.1, 0.7, 1.0, 1.9, 2.1, 5.0, 15.0, 40.0}) {
            CAPTURE(mu);
            CAPTURE(s);
            CHECK(rel_err(bessel_k(mu, s), bessel_k_integral(mu, s)) < 1e-10);
        }
    }
    // the oracle itself reproduces the frozen values
    CHECK(rel_err(bessel_k_integral(3.0, 1.0), 7.101262824737944506) < 1e-12);
}

TEST_CASE("bessel K closed forms and recurrence")
{
    for (double s : {1e-6, 0.3, 1.0, 7.5, 50.0}) {
        CHECK(rel_err(bessel_k(0.5, s), std::sqrt(std::numbers::pi / (2.0 * s)) * std::exp(-s)) < 1e-14);
    }
    CHECK(rel_err(bessel_k(2.0, 1.0), bessel_k0(1.0) + 2.0 * bessel_k1(1.0)) < 1e-15);
    const auto [k0, k1] = bessel_k01(3.3);
    CHECK(k0 == bessel_k0(3.3));
    CHECK(k1 == bessel_k1(3.3));

    CHECK_THROWS_AS(bessel_k(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(bessel_k(1.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(bessel_k(0.3, 1.0), InvalidArgument);
    CHECK_THROWS_AS(bessel_k(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("radial profile limit, monotonicity and derivative identity")
{
    for (double mu : {0.5, 1.0, 2.0, 3.5, 5.0}) {
        CHECK(rel_err(radial_profile(mu, 0.0), std::pow(2.0, mu - 1.0) * std::tgamma(mu)) < 1e-14);
        CHECK(rel_err(radial_profile(mu, 1e-7), radial_profile(mu, 0.0)) < 1e-6);
        double prev = radial_profile(mu, 0.0);
        for (double s = 0.05; s < 30.0; s += 0.05) {
            const double g = radial_profile(mu, s);
            CHECK(g > 0.0);
            CHECK(g < prev);
            prev = g;
        }
    }
    for (double mu : {2.0, 3.0, 4.0, 5.0}) {
        for (double s : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double step = 1e-5 * std::max(1.0, s);
            const double fd = (radial_profile(mu, s + step) - radial_profile(mu, s - step)) / (2.0 * step);
            CAPTURE(mu);
            CAPTURE(s);
            CHECK(std::abs(fd + s * radial_profile(mu - 1.0, s)) <= 1e-6 * radial_profile(mu, s));
        }
    }
}

TEST_CASE("MaternSpec derived quantities and validation")
{
    const MaternSpec m(4, 2, 5.0);
    CHECK(m.nu() == 3.0);
    CHECK(m.norm_c() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK_FALSE(m.half_integer());
    CHECK(MaternSpec(4, 3, 1.0).half_integer());
    CHECK_THROWS_AS(MaternSpec(1, 2, 1.0), InvalidArgument);
    CHECK_THROWS_AS(MaternSpec(4, 2, 0.0), InvalidArgument);
    CHECK_THROWS_AS(MaternSpec(4, 4, 1.0), InvalidArgument);
}

TEST_CASE("matern_eval values and symmetry")
{
    const MaternSpec m(4, 2, 1.0);
    Point x(2), y(2);
    x << 0.3, -0.2;
    y << 0.3, 0.8;
    CHECK(rel_err(matern_eval(m, x, y), 7.101262824737944506 / 8.0) < 1e-14);

    Rng rng(1);
    for (int tau : {3, 4, 5, 6}) {
        for (int d : {1, 2, 3}) {
            const MaternSpec s(tau, d, 5.0);
            for (int k = 0; k < 20; ++k) {
                const Point a = random_point(rng, d);
                const Point b = random_point(rng, d);
                CHECK(matern_eval(s, a, a) == 1.0);
                CHECK(matern_eval(s, a, b) == matern_eval(s, b, a));
                CHECK(matern_eval(s, a, b) > 0.0);
            }
        }
    }
    // underflow cutoff
    Point far(2);
    far << 200.0, 0.0;
    Point origin = Point::Zero(2);
    CHECK(matern_eval(MaternSpec(4, 2, 5.0), far, origin) == 0.0);
}

TEST_CASE("matern_eval decays monotonically")
{
    const MaternSpec m(5, 2, 5.0);
    Point o = Point::Zero(2);
    double prev = 1.0;
    for (double r = 0.01; r < 3.0; r += 0.01) {
        Point p(2);
        p << r, 0.0;
        const double v = matern_eval(m, p, o);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("coincident-point jet")
{
    for (int tau : {4, 5, 6}) {
        for (double eps : {1.0, 5.0}) {
            const MaternSpec m(tau, 2, eps);
            Point x(2);
            x << 0.1, 0.4;
            const KernelJet j = matern_jet(m, x, x);
            CHECK(j.value == 1.0);
            CHECK(j.gradient.isZero(0.0));
            const double expect = -eps * eps / (2.0 * (m.nu() - 1.0));
            CHECK(rel_err(j.hessian(0, 0), expect) < 1e-14);
            CHECK(rel_err(j.hessian(1, 1), expect) < 1e-14);
            CHECK(j.hessian(0, 1) == 0.0);
        }
    }
    const KernelJet j = matern_jet(MaternSpec(4, 2, 1.0), Point::Zero(2), Point::Zero(2));
    CHECK(j.hessian(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK_THROWS_AS(matern_jet(MaternSpec(2, 2, 1.0), Point::Zero(2), Point::Zero(2)), InvalidArgument);
}

TEST_CASE("matern_jet matches finite differences")
{
    Rng rng(42);
    const double h = 1e-5;
    for (int tau : {4, 5, 6}) {
        for (double eps : {1.0, 5.0}) {
            for (int d : {2, 3}) {
                if (tau - 0.5 * d < 2.0) {
                    continue;
                }
                const MaternSpec m(tau, d, eps);
                for (int k = 0; k < 20; ++k) {
                    const Point x = random_point(rng, d, -0.5, 0.5);
                    const Point y = random_point(rng, d, -0.5, 0.5);
                    const KernelJet j = matern_jet(m, x, y);
                    const double gscale = j.gradient.norm();
                    const double hscale = j.hessian.norm();
                    CHECK((j.hessian - j.hessian.transpose()).norm() <= 1e-12 * hscale);
                    for (int a = 0; a < d; ++a) {
                        Point xp = x, xm = x;
                        xp[a] += h;
                        xm[a] -= h;
                        const double fd = (matern_eval(m, xp, y) - matern_eval(m, xm, y)) / (2.0 * h);
                        CHECK(std::abs(fd - j.gradient[a]) <= 1e-6 * gscale);
                        const Point col = (matern_jet(m, xp, y).gradient - matern_jet(m, xm, y).gradient) / (2.0 * h);
                        CHECK((col - j.hessian.col(a)).norm() <= 1e-4 * hscale);
                    }
                }
            }
        }
    }
}

TEST_CASE("apply_elliptic")
{
    const MaternSpec m(4, 2, 1.0);
    const EllipticOperator helm = EllipticOperator::modified_helmholtz(2);
    Point x(2);
    x << 0.2, 0.3;
    CHECK(apply_elliptic(m, helm, x, x) == doctest::Approx(-1.5).epsilon(1e-14));

    Rng rng(9);
    const EllipticOperator ident = EllipticOperator::identity(2);
    for (int k = 0; k < 20; ++k) {
        const Point a = random_point(rng, 2);
        const Point b = random_point(rng, 2);
        CHECK(apply_elliptic(m, ident, a, b) == doctest::Approx(matern_eval(m, a, b)).epsilon(1e-15));
    }

    const double h = 1e-4;
    for (double eps : {1.0, 5.0}) {
        const MaternSpec s(5, 2, eps);
        for (int k = 0; k < 20; ++k) {
            const Point a = random_point(rng, 2, -0.5, 0.5);
            const Point b = random_point(rng, 2, -0.5, 0.5);
            double lap = 0.0;
            for (int i = 0; i < 2; ++i) {
                Point ap = a, am = a;
                ap[i] += h;
                am[i] -= h;
                lap += (matern_eval(s, ap, b) - 2.0 * matern_eval(s, a, b) + matern_eval(s, am, b)) / (h * h);
            }
            const double fd = lap - matern_eval(s, a, b);
            CHECK(rel_err(apply_elliptic(s, helm, a, b), fd) < 1e-4);
        }
    }

    // a general operator: compare to the jet contracted by hand
    EllipticOperator gen;
    gen.a = [](const Point& p) {
        SmallMatrix a(2, 2);
        a << 2.0 + p[0], 0.3, 0.3, 1.0;
        return a;
    };
    gen.b = [](const Point& p) {
        Point b(2);
        b << p[1], -1.0;
        return b;
    };
    gen.c = [](const Point& p) { return 0.5 + p[0] * p[0]; };
    for (int k = 0; k < 20; ++k) {
        const Point a = random_point(rng, 2);
        const Point b = random_point(rng, 2);
        const KernelJet j = matern_jet(m, a, b);
        const OperatorCoefficients c = gen.at(a);
        const double expect = c.a.cwiseProduct(j.hessian).sum() - c.b.dot(j.gradient) - c.c * j.value;
        CHECK(apply_elliptic(m, gen, a, b) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("kernel matrices are positive definite")
{
    Rng rng(5);
    for (int tau : {4, 5, 6}) {
        const MaternSpec m(tau, 2, 5.0);
        Matrix pts(2, 100);
        for (int j = 0; j < 100; ++j) {
            pts.col(j) = random_point(rng, 2);
        }
        Matrix k(100, 100);
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 100; ++j) {
                k(i, j) = matern_eval(m, pts.col(i), pts.col(j));
            }
        }
        CHECK((k - k.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()[0] > 0.0);
    }
}
