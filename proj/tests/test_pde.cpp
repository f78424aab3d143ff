#include "kcoll/pde.hpp"
#include "kcoll/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kcoll;

namespace {

Point pt(double a, double b)
{
    Point p(2);
    p << a, b;
    return p;
}

Point random_interior(Rng& rng) { return pt(rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95)); }

// Central differences of u only; the operator is applied term by term from
// its coefficient callbacks.
double fd_operator(const EllipticProblem& prob, const Point& x, double h)
{
    const auto& u = prob.exact->u;
    const OperatorCoefficients c = prob.op.at(x);
    double second = 0.0;
    double first = 0.0;
    for (int i = 0; i < 2; ++i) {
        Point ep = Point::Zero(2);
        ep[i] = h;
        first += c.b[i] * (u(x + ep) - u(x - ep)) / (2.0 * h);
        for (int j = 0; j < 2; ++j) {
            Point eq = Point::Zero(2);
            eq[j] = h;
            const double dij = (u(x + ep + eq) - u(x + ep - eq) - u(x - ep + eq) + u(x - ep - eq)) / (4.0 * h * h);
            second += c.a(i, j) * dij;
        }
    }
    return second - first - c.c * u(x);
}

} // namespace

TEST_CASE("pde4 data")
{
    const EllipticProblem p = make_problem(ProblemId::pde4);
    CHECK_FALSE(p.exact.has_value());
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        CHECK(p.f(random_interior(rng)) == 1.0);
        const double t = rng.uniform(-1.0, 1.0);
        CHECK(p.g(pt(1.0, t)) == 0.0);
        CHECK(p.g(pt(t, -1.0)) == 0.0);
    }
    CHECK_THROWS_AS(manufactured_source(p, pt(0.0, 0.0)), InvalidArgument);
}

TEST_CASE("pde2 boundary data vanishes on x = +-1")
{
    const EllipticProblem p = make_problem(ProblemId::pde2);
    for (double y = -1.0; y <= 1.0; y += 0.125) {
        CHECK(p.g(pt(1.0, y)) == 0.0);
        CHECK(p.g(pt(-1.0, y)) == 0.0);
    }
}

TEST_CASE("pde3 source at its centre")
{
    CHECK(make_problem(ProblemId::pde3).f(pt(0.0, 0.0)) == doctest::Approx(-41.0).epsilon(1e-14));
    const EllipticProblem off = make_problem("3s");
    CHECK(off.name == "pde3-offset");
    CHECK(off.f(pt(0.5, 0.75)) == doctest::Approx(-41.0).epsilon(1e-14));
    CHECK(manufactured_source(off, pt(0.5, 0.75)) == doctest::Approx(-41.0).epsilon(1e-14));
    CHECK_THROWS(make_problem(ProblemId::pde3, Eigen::Vector2d(1.5, 0.0)));
}

TEST_CASE("layered diffusion coefficient")
{
    CHECK(layered_diffusion_grad(pt(0.3, -0.3))[0] == -100.0);
    CHECK(layered_diffusion_grad(pt(0.3, -0.3))[1] == -100.0);
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        const Point x = pt(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const double c = layered_diffusion(x);
        CHECK(c < -std::numbers::pi / 4.0);
        CHECK(c > -5.0 * std::numbers::pi / 4.0);
        const double h = 1e-7;
        const double fd = (layered_diffusion(x + pt(h, 0.0)) - layered_diffusion(x - pt(h, 0.0))) / (2.0 * h);
        CHECK(std::abs(fd - layered_diffusion_grad(x)[0]) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("manufactured data is consistent for pde1-pde3")
{
    Rng rng(3);
    for (const char* name : {"1", "2", "3", "3s"}) {
        const EllipticProblem p = make_problem(name);
        REQUIRE(p.exact.has_value());
        const ExactSolution& e = *p.exact;
        for (int k = 0; k < 1000; ++k) {
            const Point x = random_interior(rng);
            CHECK(std::abs(p.f(x) - manufactured_source(p, x)) <= 1e-8 * std::max(1.0, std::abs(p.f(x))));
            const double t = rng.uniform(-1.0, 1.0);
            for (const Point& b : {pt(1.0, t), pt(-1.0, t), pt(t, 1.0), pt(t, -1.0)}) {
                CHECK(p.g(b) == e.u(b));
            }
        }
    }
}

TEST_CASE("exact-solution jets and sources match finite differences")
{
    Rng rng(4);
    for (const char* name : {"1", "2", "3", "3s"}) {
        const EllipticProblem p = make_problem(name);
        const ExactSolution& e = *p.exact;
        // pde2 varies on a 1/100 scale across x + y = 0; keep away from it
        for (int k = 0; k < 200; ++k) {
            Point x = random_interior(rng);
            if (std::string(name) == "2" && std::abs(x[0] + x[1]) < 0.2) {
                continue;
            }
            const double h = 1e-5;
            const Point g = e.grad_u(x);
            const SmallMatrix hs = e.hess_u(x);
            const double gs = std::max(g.norm(), 1e-3);
            const double hsn = std::max(hs.norm(), 1e-3);
            for (int i = 0; i < 2; ++i) {
                Point ei = Point::Zero(2);
                ei[i] = h;
                const double fd = (e.u(x + ei) - e.u(x - ei)) / (2.0 * h);
                CHECK(std::abs(fd - g[i]) <= 1e-5 * gs);
                const Point col = (e.grad_u(x + ei) - e.grad_u(x - ei)) / (2.0 * h);
                CHECK((col - hs.col(i)).norm() <= 1e-5 * hsn);
            }
            // Richardson-extrapolated central differences, O(h^4)
            const double fd_src = (4.0 * fd_operator(p, x, 5e-4) - fd_operator(p, x, 1e-3)) / 3.0;
            CHECK(std::abs(fd_src - manufactured_source(p, x)) <= 1e-6 * std::max(1.0, std::abs(fd_src)));
        }
    }
}

TEST_CASE("problem lookup")
{
    CHECK(parse_problem_id("pde2") == ProblemId::pde2);
    CHECK(parse_problem_id("4") == ProblemId::pde4);
    CHECK(make_problem("1").name == "pde1");
    CHECK_THROWS_AS(parse_problem_id("7"), InvalidArgument);
}
