#include "kcoll/random.hpp"
#include "kcoll/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace kcoll;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index m, Eigen::Index n)
{
    Matrix a(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            a(i, j) = rng.uniform(-1.0, 1.0);
        }
    }
    return a;
}

Matrix random_spd(Rng& rng, Eigen::Index n)
{
    const Matrix b = random_matrix(rng, n, n);
    return b * b.transpose() + Matrix::Identity(n, n);
}

} // namespace

TEST_CASE("small least-squares systems")
{
    Matrix a(3, 2);
    a << 1, 0, 0, 1, 1, 1;
    Vector b(3);
    b << 1, 2, 3;
    const LstsqResult r = solve_lstsq(a, b);
    CHECK(r.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.coeffs[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.residual_norm < 1e-14);
    CHECK(r.rank_estimate == 2);
    CHECK_FALSE(r.truncated);

    const Matrix ones = Matrix::Ones(3, 1);
    Vector c(3);
    c << 0, 1, 2;
    const LstsqResult mean = solve_lstsq(ones, c);
    CHECK(mean.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean.residual_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("lstsq matches the normal-equation oracle")
{
    Rng rng(2024);
    for (int k = 0; k < 100; ++k) {
        const Matrix a = random_matrix(rng, 40, 10);
        Vector b(40);
        for (int i = 0; i < 40; ++i) {
            b[i] = rng.uniform(-1.0, 1.0);
        }
        const Vector oracle = (a.transpose() * a).llt().solve(a.transpose() * b);
        const LstsqResult r = solve_lstsq(a, b);
        CHECK((r.coeffs - oracle).norm() <= 1e-8 * oracle.norm());
        const Vector resid = a * r.coeffs - b;
        CHECK((a.transpose() * resid).norm() <= 1e-8 * a.norm() * b.norm());
    }
}

TEST_CASE("rank-deficient systems are truncated and flagged")
{
    Rng rng(5);
    Matrix a = random_matrix(rng, 20, 4);
    a.col(3) = a.col(0) + a.col(1);
    const Vector b = a * Vector::Ones(4);
    const LstsqResult r = solve_lstsq(a, b);
    CHECK(r.truncated);
    CHECK(r.rank_estimate == 3);
    CHECK(r.residual_norm <= 1e-12 * b.norm());
}

TEST_CASE("lstsq validation")
{
    CHECK_THROWS_AS(solve_lstsq(Matrix::Ones(2, 3), Vector::Ones(2)), InvalidArgument);
    Matrix a = Matrix::Ones(3, 2);
    a(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_lstsq(a, Vector::Ones(3)), InvalidArgument);
    CHECK_THROWS_AS(solve_lstsq(Matrix::Ones(3, 2), Vector::Ones(2)), InvalidArgument);
}

TEST_CASE("cond2")
{
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 10.0;
    CHECK(cond2(d) == doctest::Approx(10.0).epsilon(1e-14));

    Rng rng(8);
    const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(rng, 6, 6)).householderQ();
    CHECK(cond2(q) == doctest::Approx(1.0).epsilon(1e-13));

    for (int k = 0; k < 10; ++k) {
        const Matrix a = random_matrix(rng, 30, 8);
        const double ka = cond2(a);
        CHECK(cond2(a.transpose() * a) == doctest::Approx(ka * ka).epsilon(1e-6));
    }
    Matrix sing = Matrix::Ones(3, 3);
    CHECK(std::isinf(cond2(sing)));
    CHECK_THROWS_AS(cond2(Matrix(0, 0)), InvalidArgument);
}

TEST_CASE("generalized eigenvalue extremes")
{
    Rng rng(11);
    const Matrix g = random_spd(rng, 8);
    auto [lo, hi] = gen_eig_extremes(g, g);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    std::tie(lo, hi) = gen_eig_extremes(2.0 * g, g);
    CHECK(lo == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(2.0).epsilon(1e-12));

    for (int k = 0; k < 10; ++k) {
        const Matrix g1 = random_spd(rng, 8);
        const Matrix g2 = random_spd(rng, 8);
        // explicit symmetric square-root reduction
        Eigen::SelfAdjointEigenSolver<Matrix> es2(g2);
        const Matrix inv_root = es2.operatorInverseSqrt();
        Eigen::SelfAdjointEigenSolver<Matrix> es(inv_root * g1 * inv_root, Eigen::EigenvaluesOnly);
        std::tie(lo, hi) = gen_eig_extremes(g1, g2);
        CHECK(std::abs(lo - es.eigenvalues()[0]) <= 1e-8 * es.eigenvalues()[7]);
        CHECK(std::abs(hi - es.eigenvalues()[7]) <= 1e-8 * es.eigenvalues()[7]);
    }

    // semidefinite first argument clamps at zero
    Matrix g1 = Matrix::Zero(3, 3);
    g1(0, 0) = 1.0;
    std::tie(lo, hi) = gen_eig_extremes(g1, Matrix::Identity(3, 3));
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(1.0));

    Matrix indef = Matrix::Identity(3, 3);
    indef(2, 2) = -1.0;
    CHECK_THROWS_AS(gen_eig_extremes(Matrix::Identity(3, 3), indef), NumericalError);
    Matrix asym = Matrix::Identity(3, 3);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(gen_eig_extremes(asym, Matrix::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("identity-weight solution is near-optimal in any weighted norm")
{
    Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        const Matrix a = random_matrix(rng, 30, 6);
        Vector b(30);
        Vector w(30);
        for (int i = 0; i < 30; ++i) {
            b[i] = rng.uniform(-1.0, 1.0);
            w[i] = rng.uniform(0.1, 3.0);
        }
        const Vector root = w.cwiseSqrt();
        const Vector a_id = solve_lstsq(a, b).coeffs;
        const Vector a_w = solve_lstsq(root.asDiagonal() * a, root.cwiseProduct(b)).coeffs;
        const double r_id = root.cwiseProduct(a * a_id - b).norm();
        const double r_w = root.cwiseProduct(a * a_w - b).norm();
        CHECK(r_id <= std::sqrt(w.maxCoeff() / w.minCoeff()) * r_w * (1.0 + 1e-12));
    }
}

TEST_CASE("solver is deterministic")
{
    Rng rng(21);
    const Matrix a = random_matrix(rng, 50, 12);
    const Vector b = random_matrix(rng, 50, 1);
    CHECK(solve_lstsq(a, b).coeffs == solve_lstsq(a, b).coeffs);
}
