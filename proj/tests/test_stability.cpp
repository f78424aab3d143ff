#include "kcoll/random.hpp"
#include "kcoll/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace kcoll;

TEST_CASE("aligned cell edge tiles the box")
{
    for (double c : {0.5, 1.0, 2.0}) {
        for (double h : {0.2, 0.1, 0.05, 0.033}) {
            const double delta = aligned_cell_edge(c, h, 2);
            CHECK(delta <= c * h * (1.0 + 1e-12));
            const double m = 2.0 / delta;
            CHECK(std::abs(m - std::round(m)) < 1e-9);
            // next coarser tiling would violate the bound
            CHECK(2.0 / (std::round(m) - 1.0) > c * h);
        }
    }
    CHECK(aligned_cell_edge(1.0, 0.2, 2) == doctest::Approx(0.2));
    CHECK(aligned_cell_edge(1.0, 0.3, 2) == doctest::Approx(2.0 / 7.0));
}

TEST_CASE("halton points")
{
    CHECK(halton_point(1, 2)[0] == 0.5);
    CHECK(halton_point(1, 2)[1] == doctest::Approx(1.0 / 3.0));
    CHECK(halton_point(2, 2)[0] == 0.25);
    CHECK(halton_point(3, 3)[2] == doctest::Approx(0.6));
}

TEST_CASE("constant function on an aligned tiling")
{
    const ScalarField one = [](const Point&) { return 1.0; };
    const RiemannSelection sel = lower_riemann_points(one, 1.0, 0.1, 2);
    CHECK(sel.points.size() == sel.cells_per_axis * sel.cells_per_axis);
    CHECK(sel.delta_sum == doctest::Approx(4.0).epsilon(1e-12));
    const BoundCheck b = check_bound(sel, 4.0);
    CHECK(sel.delta_sum <= 4.0 * (1.0 + 1e-12));
    CHECK(b.holds);
}

TEST_CASE("fill distance bracket of the interior selection")
{
    Rng rng(3);
    const MaternSpec k(4, 2, 3.0);
    Point c0(2);
    c0 << 0.3, -0.2;
    const ScalarField v = [&](const Point& x) { return matern_eval(k, x, c0) - 0.3; };
    for (double c : {0.5, 1.0}) {
        for (double h : {0.1, 0.05}) {
            const RiemannSelection sel = lower_riemann_points(v, c, h, 2);
            CHECK(sel.fill_h_P >= 0.5 * c * h);
            CHECK(sel.fill_h_P <= c * h);
            CHECK(sel.fill_h_P < sel.cell_edge_delta);
            CHECK(sel.points.coords().cwiseAbs().maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("lower Riemann sum of x^2 stays below the integral")
{
    const ScalarField v = [](const Point& x) { return x[0]; };
    const RiemannSelection sel = lower_riemann_points(v, 1.0, 0.1, 2);
    CHECK(sel.delta_sum <= 4.0 / 3.0);
    const BoundCheck b = check_bound(sel, 4.0 / 3.0);
    CHECK(b.holds);
}

TEST_CASE("selection fill distance against a brute-force probe oracle")
{
    const ScalarField v = [](const Point& x) { return std::sin(3.0 * x[0]) + x[1] * x[1]; };
    for (double c : {0.5, 1.0}) {
        const RiemannSelection sel = lower_riemann_points(v, c, 0.1, 2);
        // distance function is 1-Lipschitz: a probe grid of spacing s is within s / sqrt(2)
        const int n = 401;
        double probe_max = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Point q(2);
                q << -1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1);
                double best = std::numeric_limits<double>::infinity();
                for (Eigen::Index k = 0; k < sel.points.size(); ++k) {
                    best = std::min(best, (sel.points.point(k) - q).norm());
                }
                probe_max = std::max(probe_max, best);
            }
        }
        const double slack = 2.0 / (n - 1) / std::sqrt(2.0);
        CHECK(sel.fill_h_P >= probe_max - 1e-9 * sel.cell_edge_delta);
        CHECK(sel.fill_h_P <= probe_max + slack);
    }
}

TEST_CASE("boundary selection")
{
    const ScalarField one = [](const Point&) { return 1.0; };
    const RiemannSelection sel = boundary_riemann_points(one, 1.0, 0.1, 2);
    for (Eigen::Index i = 0; i < sel.points.size(); ++i) {
        const Point p = sel.points.point(i);
        CHECK(p.cwiseAbs().maxCoeff() == 1.0);
        CHECK(closest_point_square(p) == p);
    }
    CHECK(sel.delta_sum == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(sel.band_radius == doctest::Approx(0.025));
    CHECK(sel.fill_h_P <= 0.1);

    const ScalarField wave = [](const Point& x) { return std::sin(2.0 * x[0]) + x[1] * x[1]; };
    const RiemannSelection a = boundary_riemann_points(wave, 0.5, 0.1, 2);
    const RiemannSelection b = boundary_riemann_points(wave, 0.5, 0.1, 2);
    CHECK(a.points.coords() == b.points.coords());
    CHECK(a.discrete_sum == b.discrete_sum);

    CHECK_THROWS_AS(boundary_riemann_points(one, 4.0, 2.0, 2), InvalidArgument);
}

TEST_CASE("check_bound")
{
    RiemannSelection zero;
    const BoundCheck z = check_bound(zero, 1.0);
    CHECK(z.holds);
    CHECK(std::isinf(z.margin));

    RiemannSelection s;
    s.discrete_sum = 1.0005;
    s.delta_sum = 0.9;
    CHECK(check_bound(s, 1.0).holds);
    s.discrete_sum = 1.2;
    const BoundCheck f = check_bound(s, 1.0);
    CHECK_FALSE(f.holds);
    CHECK(f.flagged);
    s.delta_sum = 1.1;
    CHECK_FALSE(check_bound(s, 1.0).flagged);
    CHECK(check_bound(s, 1.0).margin == doctest::Approx(1.0 / 1.2));
}

TEST_CASE("norm equivalence constants")
{
    const MaternSpec spec(4, 2, 5.0);
    const EllipticOperator op = EllipticOperator::modified_helmholtz(2);
    const PointSet x = tensor_grid(4, 2);
    const QuadratureRule fine = tensor_trapezoid_rule(17, 2);
    Vector w(fine.nodes.size() + fine.boundary_nodes.size());
    w << fine.weights, fine.boundary_weights;

    const EquivalenceReport same =
        norm_equiv_constants(spec, op, x, fine.nodes, fine.boundary_nodes, w, 2.0, fine, 0.5);
    CHECK(same.c_low == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(same.c_high == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(same.n_y == fine.nodes.size());

    const PointSet y = tensor_grid(9, 2);
    const PointSet z = boundary_subset(y).boundary;
    const Vector wy = build_weights(WeightScheme::trapezoid(), y, z, TransformKind::identity());
    const EquivalenceReport r1 = norm_equiv_constants(spec, op, x, y, z, wy, 2.0, fine);
    const EquivalenceReport r3 = norm_equiv_constants(spec, op, x, y, z, 3.0 * wy, 2.0, fine);
    CHECK(r1.c_low > 0.0);
    CHECK(r1.c_low <= r1.c_high);
    CHECK(r3.c_low == doctest::Approx(3.0 * r1.c_low).epsilon(1e-9));
    CHECK(r3.c_high == doctest::Approx(3.0 * r1.c_high).epsilon(1e-9));
    CHECK(r1.spread == doctest::Approx(r1.c_high / r1.c_low));
}

TEST_CASE("stability Rayleigh quotient")
{
    const MaternSpec spec(4, 2, 5.0);
    const EllipticOperator op = EllipticOperator::modified_helmholtz(2);
    const QuadratureRule fine = tensor_trapezoid_rule(33, 2);

    Matrix one(2, 1);
    one << 0.2, -0.1;
    const PointSet x1(one);
    const double theta = 3.0;
    const double lam = stability_rayleigh(spec, op, x1, theta, fine);
    const Matrix gc = continuous_gram(spec, op, x1, theta, fine);
    const Matrix h2 = h2_gram(spec, x1, fine);
    CHECK(lam == doctest::Approx(gc(0, 0) / h2(0, 0)).epsilon(1e-12));
    CHECK(lam > 0.0);

    const PointSet x = tensor_grid(5, 2);
    const double base = stability_rayleigh(spec, op, x, theta, fine);
    CHECK(base > 0.0);
    // relabel the centres
    Matrix rev = x.coords().rowwise().reverse();
    const double relabeled = stability_rayleigh(spec, op, PointSet(rev), theta, fine);
    CHECK(relabeled == doctest::Approx(base).epsilon(1e-8));
    CHECK_THROWS_AS(stability_rayleigh(spec, op, x, theta, fine, 1), InvalidArgument);
}

TEST_CASE("h2 gram of a single centre matches a direct sum")
{
    const MaternSpec spec(5, 2, 2.0);
    const QuadratureRule fine = tensor_trapezoid_rule(9, 2);
    Matrix one(2, 1);
    one << 0.0, 0.5;
    const PointSet x(one);
    double direct = 0.0;
    for (Eigen::Index i = 0; i < fine.nodes.size(); ++i) {
        const KernelJet j = matern_jet(spec, fine.nodes[i], x[0]);
        const double h = j.hessian(0, 0) * j.hessian(0, 0) + j.hessian(0, 1) * j.hessian(0, 1) +
                         j.hessian(1, 1) * j.hessian(1, 1);
        direct += fine.weights[i] * (j.value * j.value + j.gradient.squaredNorm() + h);
    }
    CHECK(h2_gram(spec, x, fine)(0, 0) == doctest::Approx(direct).epsilon(1e-13));
}
