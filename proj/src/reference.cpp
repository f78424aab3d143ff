#include "kcoll/experiments.hpp"

#include "kcoll/random.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace kcoll {

double GridFunction::operator()(const Point& p) const
{
    require(n >= 2 && values.rows() == n && values.cols() == n, "GridFunction: not initialised");
    require(p.size() == 2, "GridFunction: 2-D points only");
    const double dx = spacing();
    const auto locate = [&](double t, Eigen::Index& i, double& frac) {
        const double s = std::clamp((t + 1.0) / dx, 0.0, static_cast<double>(n - 1));
        i = std::min(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(n - 2));
        frac = s - static_cast<double>(i);
    };
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    double fx = 0.0;
    double fy = 0.0;
    locate(p[0], i, fx);
    locate(p[1], j, fy);
    return (1.0 - fx) * (1.0 - fy) * values(i, j) + fx * (1.0 - fy) * values(i + 1, j) +
           (1.0 - fx) * fy * values(i, j + 1) + fx * fy * values(i + 1, j + 1);
}

GridFunction fd_solve_divergence(int n, const std::function<double(const Point&)>& k,
                                 const std::function<double(const Point&)>& f,
                                 const std::function<double(const Point&)>& g)
{
    require(n >= 3, "fd_solve_divergence: need at least 3 nodes per axis");
    const double dx = 2.0 / (n - 1);
    const auto node = [&](int i, int j) {
        Point p(2);
        p << -1.0 + i * dx, -1.0 + j * dx;
        return p;
    };

    Matrix kn(n, n);
    GridFunction out;
    out.n = n;
    out.values = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Point p = node(i, j);
            kn(i, j) = k(p);
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                out.values(i, j) = g(p);
            }
        }
    }

    const int m = n - 2;
    const auto index = [m](int i, int j) { return (i - 1) * m + (j - 1); };
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(5 * m * m));
    Vector rhs(static_cast<Eigen::Index>(m) * m);
    const double inv = 1.0 / (dx * dx);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            const int row = index(i, j);
            double diag = 0.0;
            double b = f(node(i, j));
            for (int s = 0; s < 4; ++s) {
                const int a = i + di[s];
                const int c = j + dj[s];
                const double kf = 0.5 * (kn(i, j) + kn(a, c)) * inv;
                diag -= kf;
                if (a == 0 || c == 0 || a == n - 1 || c == n - 1) {
                    b -= kf * out.values(a, c);
                } else {
                    trips.emplace_back(row, index(a, c), kf);
                }
            }
            trips.emplace_back(row, row, diag);
            rhs[row] = b;
        }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(m) * m, static_cast<Eigen::Index>(m) * m);
    a.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("fd_solve_divergence: factorization failed");
    }
    const Vector u = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !u.allFinite()) {
        throw NumericalError("fd_solve_divergence: solve failed");
    }
    if ((a * u - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) {
        throw NumericalError("fd_solve_divergence: residual check failed");
    }
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            out.values(i, j) = u[index(i, j)];
        }
    }
    return out;
}

GridFunction fd_reference_pde4(int n)
{
    return fd_solve_divergence(
        n, layered_diffusion, [](const Point&) { return 1.0; }, [](const Point&) { return 0.0; });
}

std::function<double(const Point&)> random_matern_field(std::uint64_t seed, int dim)
{
    require(dim >= 1 && dim <= kMaxDim, "random_matern_field: unsupported dimension");
    Rng rng(seed);
    struct Bump {
        MaternSpec spec;
        double weight;
        Point center;
    };
    std::vector<Bump> bumps;
    const int count = 2 + static_cast<int>(rng.uniform() * 4.0);
    // profiles built for an odd dimension have half-integer order and a closed
    // form, which keeps 10^6-node oracles cheap
    const int profile_dim = dim == 2 ? 3 : dim;
    for (int b = 0; b < count; ++b) {
        const int tau = 3 + static_cast<int>(rng.uniform() * 3.0);
        const double eps = rng.uniform(1.0, 6.0);
        const double weight = rng.uniform(-1.0, 1.0);
        Point c(dim);
        for (int k = 0; k < dim; ++k) {
            c[k] = rng.uniform(-1.2, 1.2);
        }
        bumps.push_back({MaternSpec(tau, profile_dim, eps), weight, c});
    }
    return [bumps](const Point& x) {
        double s = 0.0;
        for (const auto& b : bumps) {
            s += b.weight * matern_eval(b.spec, x, b.center);
        }
        return s;
    };
}

namespace {

Vector simpson_weights(int n)
{
    require(n >= 3 && n % 2 == 1, "simpson: node count must be odd and >= 3");
    const double dx = 2.0 / (n - 1);
    Vector w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    }
    return w * (dx / 3.0);
}

} // namespace

double simpson_box_sq_norm(const std::function<double(const Point&)>& v, int n, int dim)
{
    require(dim == 2 || dim == 1, "simpson_box_sq_norm: 1-D or 2-D only");
    const Vector w = simpson_weights(n);
    const double dx = 2.0 / (n - 1);
    Point p(dim);
    double total = 0.0;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            p[0] = -1.0 + i * dx;
            const double f = v(p);
            total += w[i] * f * f;
        }
        return total;
    }
    for (int i = 0; i < n; ++i) {
        p[0] = -1.0 + i * dx;
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            p[1] = -1.0 + j * dx;
            const double f = v(p);
            row += w[j] * f * f;
        }
        total += w[i] * row;
    }
    return total;
}

double simpson_boundary_sq_norm(const std::function<double(const Point&)>& v, int n, int dim)
{
    require(dim == 2, "simpson_boundary_sq_norm: 2-D only");
    const Vector w = simpson_weights(n);
    const double dx = 2.0 / (n - 1);
    Point p(2);
    double total = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        for (double side : {-1.0, 1.0}) {
            for (int i = 0; i < n; ++i) {
                p[axis] = side;
                p[1 - axis] = -1.0 + i * dx;
                const double f = v(p);
                total += w[i] * f * f;
            }
        }
    }
    return total;
}

std::vector<LemmaCase> run_lemma_suite(bool boundary, int n_functions, std::uint64_t seed,
                                       const std::vector<double>& c_values, const std::vector<double>& h_values,
                                       int oracle_n)
{
    require(n_functions >= 1, "run_lemma_suite: need at least one function");
    std::vector<LemmaCase> out;
    for (int f = 0; f < n_functions; ++f) {
        const auto v = random_matern_field(splitmix64(seed + static_cast<std::uint64_t>(f)), 2);
        const double oracle = boundary ? simpson_boundary_sq_norm(v, oracle_n) : simpson_box_sq_norm(v, oracle_n);
        for (double c : c_values) {
            for (double h : h_values) {
                LemmaCase lc;
                lc.function = f;
                lc.c = c;
                lc.h = h;
                lc.oracle = oracle;
                lc.selection = boundary ? boundary_riemann_points(v, c, h, 2) : lower_riemann_points(v, c, h, 2);
                lc.check = check_bound(lc.selection, oracle);
                const double fill = lc.selection.fill_h_P;
                lc.fill_in_bracket = fill >= 0.5 * c * h * (1.0 - 1e-12) && fill <= c * h * (1.0 + 1e-12);
                if (boundary) {
                    for (Eigen::Index i = 0; i < lc.selection.points.size(); ++i) {
                        lc.on_boundary = lc.on_boundary && on_box_boundary(lc.selection.points[i]);
                    }
                }
                out.push_back(std::move(lc));
            }
        }
    }
    return out;
}

} // namespace kcoll
