#include "kcoll/assembly.hpp"

#include "kcoll/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kcoll {

std::string to_string(const WeightScheme& w)
{
    switch (w.tag) {
    case WeightTag::identity:
        return "identity";
    case WeightTag::random:
        return "random";
    case WeightTag::trapezoid:
        return "trapezoid";
    }
    return "identity";
}

Matrix kernel_matrix(const MaternSpec& spec, const PointSet& p, const PointSet& x)
{
    require(p.dim() == x.dim() || p.empty() || x.empty(), "kernel_matrix: dimension mismatch");
    Matrix out(p.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const Point xj = x.point(j);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            out(i, j) = matern_eval(spec, p[i], xj);
        }
    }
    return out;
}

Matrix operator_matrix(const MaternSpec& spec, const EllipticOperator& op, const PointSet& p, const PointSet& x)
{
    require(spec.nu() >= 2.0, "operator_matrix: kernel order nu must be >= 2");
    require(p.dim() == x.dim() || p.empty() || x.empty(), "operator_matrix: dimension mismatch");
    // fill the transpose so the inner loop runs down contiguous columns
    Matrix out_t(x.size(), p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const Point pi = p.point(i);
        const OperatorCoefficients coef = op.at(pi);
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            out_t(j, i) = apply_elliptic(spec, coef, pi, x[j]);
        }
    }
    return out_t.transpose();
}

CollocationSystem assemble_system(const EllipticProblem& prob, const MaternSpec& spec, const PointSet& x,
                                  const PointSet& y, const PointSet& z, double theta)
{
    require(!x.empty(), "assemble_system: no trial centers");
    require(!y.empty() && !z.empty(), "assemble_system: Y and Z must be nonempty");
    require(theta > 0.0 && std::isfinite(theta), "assemble_system: theta must be positive");
    require(x.dim() == spec.dim() && y.dim() == spec.dim() && z.dim() == spec.dim(),
            "assemble_system: point sets must match the kernel dimension");
    if (x.size() > 1) {
        require(separation_distance(x) > 0.5 * kDedupTol, "assemble_system: duplicate trial centers");
    }

    const Eigen::Index ny = y.size();
    const Eigen::Index nz = z.size();
    CollocationSystem sys;
    sys.design.resize(ny + nz, x.size());
    sys.design.topRows(ny) = operator_matrix(spec, prob.op, y, x);
    sys.design.bottomRows(nz) = theta * kernel_matrix(spec, z, x);
    sys.rhs.resize(ny + nz);
    for (Eigen::Index i = 0; i < ny; ++i) {
        sys.rhs[i] = prob.f(y.point(i));
    }
    for (Eigen::Index i = 0; i < nz; ++i) {
        sys.rhs[ny + i] = theta * prob.g(z.point(i));
    }
    sys.row_weights = Vector::Ones(ny + nz);
    sys.theta = theta;
    sys.meta = {x.size(), ny, nz};
    require(sys.design.allFinite() && sys.rhs.allFinite(), "assemble_system: non-finite entries");
    return sys;
}

double theta_default(double h)
{
    require(h > 0.0 && std::isfinite(h), "theta_default: fill distance must be positive");
    return std::pow(h, -1.5);
}

Vector trapezoid_weights_1d(const Vector& nodes)
{
    const Eigen::Index n = nodes.size();
    require(n >= 2, "trapezoid_weights_1d: need at least two nodes");
    Vector w(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        require(nodes[i + 1] > nodes[i], "trapezoid_weights_1d: nodes must be strictly increasing");
    }
    w[0] = 0.5 * (nodes[1] - nodes[0]);
    w[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        w[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    }
    return w;
}

Vector random_weights(Eigen::Index n, std::uint64_t seed)
{
    Rng rng(seed);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = rng.uniform(0.5, 1.5);
    }
    return w;
}

namespace {

struct TensorAxes {
    std::vector<std::vector<double>> pre;   // sorted distinct coordinates per axis
    std::vector<Vector> weights;            // trapezoid weights on transformed axis nodes
};

TensorAxes tensor_axes(const PointSet& grid, const TransformKind& t)
{
    const int d = grid.dim();
    TensorAxes axes;
    Eigen::Index product = 1;
    for (int k = 0; k < d; ++k) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(grid.size()));
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            vals.push_back(grid.coords()(k, i));
        }
        std::sort(vals.begin(), vals.end());
        std::vector<double> uniq;
        for (double v : vals) {
            if (uniq.empty() || v - uniq.back() > kDedupTol) {
                uniq.push_back(v);
            }
        }
        require(uniq.size() >= 2, "build_weights: trapezoid weights need a tensor grid (axis has < 2 nodes)");
        Vector mapped(static_cast<Eigen::Index>(uniq.size()));
        for (std::size_t i = 0; i < uniq.size(); ++i) {
            mapped[static_cast<Eigen::Index>(i)] = t(uniq[i]);
        }
        axes.weights.push_back(trapezoid_weights_1d(mapped));
        product *= static_cast<Eigen::Index>(uniq.size());
        axes.pre.push_back(std::move(uniq));
    }
    require(product == grid.size(), "build_weights: trapezoid weights need a tensor grid");
    return axes;
}

Eigen::Index axis_index(const std::vector<double>& axis, double v)
{
    const auto it = std::lower_bound(axis.begin(), axis.end(), v - kDedupTol);
    require(it != axis.end() && std::abs(*it - v) <= kDedupTol, "build_weights: point is not on the tensor grid");
    return static_cast<Eigen::Index>(it - axis.begin());
}

} // namespace

Vector build_weights(const WeightScheme& scheme, const PointSet& y_pre, const PointSet& z_pre, const TransformKind& t)
{
    const Eigen::Index ny = y_pre.size();
    const Eigen::Index nz = z_pre.size();
    switch (scheme.tag) {
    case WeightTag::identity:
        return Vector::Ones(ny + nz);
    case WeightTag::random:
        return random_weights(ny + nz, scheme.seed);
    case WeightTag::trapezoid:
        break;
    }

    const TensorAxes axes = tensor_axes(y_pre, t);
    const int d = y_pre.dim();
    Vector w(ny + nz);
    for (Eigen::Index i = 0; i < ny; ++i) {
        double prod = 1.0;
        for (int k = 0; k < d; ++k) {
            prod *= axes.weights[k][axis_index(axes.pre[k], y_pre.coords()(k, i))];
        }
        w[i] = prod;
    }
    // boundary: face-wise trapezoid, summed over every face a point lies on
    for (Eigen::Index i = 0; i < nz; ++i) {
        double total = 0.0;
        bool on_face = false;
        for (int k = 0; k < d; ++k) {
            if (std::abs(std::abs(z_pre.coords()(k, i)) - 1.0) > kBoundaryTol) {
                continue;
            }
            on_face = true;
            double prod = 1.0;
            for (int j = 0; j < d; ++j) {
                if (j != k) {
                    prod *= axes.weights[j][axis_index(axes.pre[j], z_pre.coords()(j, i))];
                }
            }
            total += prod;
        }
        require(on_face, "build_weights: Z point is not on the box boundary");
        w[ny + i] = total;
    }
    return w;
}

CollocationSystem weight_and_scale(CollocationSystem sys, const Vector& w)
{
    require(w.size() == sys.design.rows(), "weight_and_scale: weight length must match the row count");
    require(w.allFinite() && (w.array() > 0.0).all(), "weight_and_scale: weights must be positive and finite");
    const Vector root = w.cwiseSqrt();
    sys.design = root.asDiagonal() * sys.design;
    sys.rhs = root.cwiseProduct(sys.rhs);
    sys.row_weights = w;
    return sys;
}

double weight_condition(const Vector& w)
{
    require(w.size() > 0 && (w.array() > 0.0).all(), "weight_condition: weights must be positive");
    return w.maxCoeff() / w.minCoeff();
}

QuadratureRule tensor_trapezoid_rule(int n_per_axis, int dim, const TransformKind& t)
{
    const PointSet pre = tensor_grid(n_per_axis, dim);
    const BoundarySplit split = boundary_subset(pre);
    const Vector w = build_weights(WeightScheme::trapezoid(), pre, split.boundary, t);
    QuadratureRule q;
    q.nodes = apply_transform(t, pre);
    q.boundary_nodes = PointSet(apply_transform(t, split.boundary).coords(), PointKind::boundary_only);
    q.weights = w.head(pre.size());
    q.boundary_weights = w.tail(split.boundary.size());
    return q;
}

} // namespace kcoll
