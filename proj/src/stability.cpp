#include "kcoll/stability.hpp"

#include "kcoll/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <vector>

namespace kcoll {

namespace {

constexpr double kFillTolerance = 1e-9;

double radical_inverse(int i, int base)
{
    double inv = 1.0 / base;
    double f = inv;
    double out = 0.0;
    while (i > 0) {
        out += f * (i % base);
        i /= base;
        f *= inv;
    }
    return out;
}

// Calls fn(lo) for the lower corner of every cell of an n^d lattice of cells
// with edge delta starting at `origin`.
template <typename Fn>
void for_each_cell(int n, int dim, double origin, double delta, Fn&& fn)
{
    std::array<int, kMaxDim> idx{0, 0, 0};
    long total = 1;
    for (int k = 0; k < dim; ++k) {
        total *= n;
    }
    Point lo(dim);
    for (long c = 0; c < total; ++c) {
        long rest = c;
        for (int k = dim - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(rest % n);
            rest /= n;
        }
        for (int k = 0; k < dim; ++k) {
            lo[k] = origin + delta * idx[k];
        }
        fn(lo);
    }
}

// Relative edge of the central sub-cell holding the candidates. Every point
// of a cell is then closer than delta to the cell's pick.
double candidate_fraction(int dim)
{
    return std::min(0.9, 0.9 * (2.0 / std::sqrt(static_cast<double>(dim)) - 1.0));
}

struct SearchBox {
    Point lo;
    Point hi;
    double upper = 0.0;
};

// Fill distance of `p` over a union of axis-aligned boxes (faces are boxes
// with one degenerate axis), by branch and bound on the 1-Lipschitz distance
// function. The result is within `tol` of the supremum.
double fill_distance_bnb(const PointSet& p, const std::vector<std::pair<Point, Point>>& cover, double tol)
{
    const PointLocator locator(p);
    double best = 0.0;
    const auto make = [&](const Point& lo, const Point& hi) {
        const Point mid = 0.5 * (lo + hi);
        const double f = locator.nearest_distance(mid);
        best = std::max(best, f);
        return SearchBox{lo, hi, f + 0.5 * (hi - lo).norm()};
    };
    const auto cmp = [](const SearchBox& a, const SearchBox& b) { return a.upper < b.upper; };
    std::priority_queue<SearchBox, std::vector<SearchBox>, decltype(cmp)> queue(cmp);
    for (const auto& [lo, hi] : cover) {
        queue.push(make(lo, hi));
    }
    const int dim = p.dim();
    while (!queue.empty() && queue.top().upper > best + tol) {
        const SearchBox b = queue.top();
        queue.pop();
        const Point mid = 0.5 * (b.lo + b.hi);
        int n_split = 0;
        std::array<int, kMaxDim> axes{};
        for (int k = 0; k < dim; ++k) {
            if (b.hi[k] > b.lo[k]) {
                axes[n_split++] = k;
            }
        }
        for (int mask = 0; mask < (1 << n_split); ++mask) {
            Point lo = b.lo;
            Point hi = b.hi;
            for (int s = 0; s < n_split; ++s) {
                const int k = axes[s];
                if (mask & (1 << s)) {
                    lo[k] = mid[k];
                } else {
                    hi[k] = mid[k];
                }
            }
            const SearchBox child = make(lo, hi);
            if (child.upper > best + tol) {
                queue.push(child);
            }
        }
    }
    return best;
}

std::vector<std::pair<Point, Point>> box_cover(int m, int dim)
{
    std::vector<std::pair<Point, Point>> cover;
    const double delta = 2.0 / m;
    for_each_cell(m, dim, -1.0, delta, [&](const Point& lo) {
        cover.emplace_back(lo, lo + Point::Constant(dim, delta));
    });
    return cover;
}

std::vector<std::pair<Point, Point>> face_cover(int m, int dim)
{
    std::vector<std::pair<Point, Point>> cover;
    const double delta = 2.0 / m;
    for (const auto& [lo, hi] : box_cover(m, dim)) {
        for (int k = 0; k < dim; ++k) {
            for (double side : {-1.0, 1.0}) {
                const bool touches = side < 0.0 ? lo[k] <= -1.0 + 0.5 * delta : hi[k] >= 1.0 - 0.5 * delta;
                if (touches) {
                    Point flo = lo;
                    Point fhi = hi;
                    flo[k] = side;
                    fhi[k] = side;
                    cover.emplace_back(flo, fhi);
                }
            }
        }
    }
    return cover;
}

double sum_squares(const ScalarField& v, const PointSet& p)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double val = v(p.point(i));
        s += val * val;
    }
    return s;
}

PointSet to_point_set(const std::vector<Point>& pts, int dim, PointKind kind)
{
    Matrix c(dim, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        c.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return PointSet(std::move(c), kind);
}

// sqrt(w) .* B, so that B^T W B = S^T S.
Matrix row_scaled(const Matrix& b, const Vector& w)
{
    require((w.array() >= 0.0).all(), "gram: weights must be non-negative");
    return w.cwiseSqrt().asDiagonal() * b;
}

Matrix gram(const Matrix& scaled)
{
    Matrix g = Matrix::Zero(scaled.cols(), scaled.cols());
    g.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    return g.selfadjointView<Eigen::Lower>();
}

} // namespace

double aligned_cell_edge(double c, double h, int dim)
{
    require(c > 0.0 && h > 0.0, "aligned_cell_edge: C and h must be positive");
    require(dim >= 1 && dim <= kMaxDim, "aligned_cell_edge: unsupported dimension");
    const double m = std::ceil(2.0 / (c * h) - 1e-12);
    return 2.0 / m;
}

Point halton_point(int i, int dim)
{
    static constexpr std::array<int, kMaxDim> bases{2, 3, 5};
    Point p(dim);
    for (int k = 0; k < dim; ++k) {
        p[k] = radical_inverse(i, bases[k]);
    }
    return p;
}

RiemannSelection lower_riemann_points(const ScalarField& v, double c, double h, int dim, int samples_per_cell)
{
    require(samples_per_cell >= 4, "lower_riemann_points: need at least 4 samples per cell");
    const double delta = aligned_cell_edge(c, h, dim);
    const int m = static_cast<int>(std::lround(2.0 / delta));
    require(m >= 4, "lower_riemann_points: cell edge too large (fewer than 4 cells per axis)");

    const double frac = candidate_fraction(dim);
    std::vector<Point> offsets;
    for (int i = 1; i <= samples_per_cell; ++i) {
        offsets.push_back(delta * (Point::Constant(dim, 0.5 * (1.0 - frac)) + frac * halton_point(i, dim)));
    }

    std::vector<Point> picks;
    picks.reserve(static_cast<std::size_t>(std::pow(m, dim)));
    for_each_cell(m, dim, -1.0, delta, [&](const Point& lo) {
        double best = std::numeric_limits<double>::infinity();
        Point arg = lo;
        for (const Point& off : offsets) {
            const Point cand = lo + off;
            const double val = v(cand);
            if (val * val < best) {
                best = val * val;
                arg = cand;
            }
        }
        picks.push_back(arg);
    });

    RiemannSelection sel;
    sel.points = unique_points(to_point_set(picks, dim, PointKind::interior_or_mixed));
    require(!sel.points.empty(), "lower_riemann_points: empty selection");
    sel.cell_edge_delta = delta;
    sel.cells_per_axis = m;
    sel.fill_h_P = fill_distance_bnb(sel.points, box_cover(m, dim), kFillTolerance * delta);
    const double ss = sum_squares(v, sel.points);
    sel.discrete_sum = std::pow(sel.fill_h_P, dim) * ss;
    sel.delta_sum = std::pow(delta, dim) * ss;
    return sel;
}

RiemannSelection boundary_riemann_points(const ScalarField& v, double c, double h, int dim, int samples_per_cell)
{
    require(dim >= 2, "boundary_riemann_points: boundary needs dim >= 2");
    require(samples_per_cell >= 4, "boundary_riemann_points: need at least 4 samples per cell");
    const double delta = aligned_cell_edge(c, h, dim);
    const int m = static_cast<int>(std::lround(2.0 / delta));
    require(m >= 4, "boundary_riemann_points: cell edge too large (fewer than 4 cells per axis)");
    const double r = std::pow(c, dim) * h / std::pow(2.0, dim);
    require(r < 1.0, "boundary_riemann_points: band radius exceeds the inradius of the box");

    const int max_tries = 64 * samples_per_cell;
    const double frac = candidate_fraction(dim);
    std::vector<Point> picks;
    // one extra layer of cells on each side covers the outer half of the band
    for_each_cell(m + 2, dim, -1.0 - delta, delta, [&](const Point& cell_lo) {
        Point lo(dim), hi(dim);
        for (int k = 0; k < dim; ++k) {
            lo[k] = std::max(cell_lo[k], -1.0 - r);
            hi[k] = std::min(cell_lo[k] + delta, 1.0 + r);
            if (lo[k] >= hi[k]) {
                return;
            }
        }
        // away from edges and corners the band piece is a slab across one face
        for (int k = 0; k < dim; ++k) {
            bool others_inside = true;
            for (int j = 0; j < dim; ++j) {
                if (j != k && (lo[j] < -1.0 + r || hi[j] > 1.0 - r)) {
                    others_inside = false;
                }
            }
            if (!others_inside) {
                continue;
            }
            if (hi[k] > 0.0) {
                lo[k] = std::max(lo[k], 1.0 - r);
            } else {
                hi[k] = std::min(hi[k], -1.0 + r);
            }
            if (lo[k] >= hi[k]) {
                return;
            }
            // tangential candidates from the central sub-cell
            for (int j = 0; j < dim; ++j) {
                if (j != k) {
                    const double mid = 0.5 * (lo[j] + hi[j]);
                    const double half = 0.5 * frac * (hi[j] - lo[j]);
                    lo[j] = mid - half;
                    hi[j] = mid + half;
                }
            }
        }
        const Point span = hi - lo;
        double best = std::numeric_limits<double>::infinity();
        Point arg;
        int accepted = 0;
        for (int i = 1; i <= max_tries && accepted < samples_per_cell; ++i) {
            const Point cand = lo + span.cwiseProduct(halton_point(i, dim));
            const Point proj = closest_point_square(cand);
            if ((proj - cand).norm() > r) {
                continue;
            }
            ++accepted;
            const double val = v(proj);
            if (val * val < best) {
                best = val * val;
                arg = proj;
            }
        }
        if (accepted > 0) {
            picks.push_back(arg);
        }
    });

    RiemannSelection sel;
    sel.points = PointSet(unique_points(to_point_set(picks, dim, PointKind::boundary_only)).coords(),
                          PointKind::boundary_only);
    require(!sel.points.empty(), "boundary_riemann_points: empty selection");
    sel.cell_edge_delta = delta;
    sel.cells_per_axis = m;
    sel.band_radius = r;
    sel.fill_h_P = fill_distance_bnb(sel.points, face_cover(m, dim), kFillTolerance * delta);
    sel.discrete_sum = std::pow(sel.fill_h_P, dim - 1) * sum_squares(v, sel.points);

    // boundary lower Riemann sum: one minimum per face cell; several picks can
    // land in the same face cell next to an edge or corner of the box
    std::map<std::array<int, kMaxDim + 1>, double> face_min;
    for (Eigen::Index i = 0; i < sel.points.size(); ++i) {
        const Point p = sel.points.point(i);
        int axis = 0;
        while (axis < dim && std::abs(std::abs(p[axis]) - 1.0) > kBoundaryTol) {
            ++axis;
        }
        std::array<int, kMaxDim + 1> key{-1, -1, -1, -1};
        key[0] = 2 * axis + (p[axis] > 0.0 ? 1 : 0);
        for (int j = 0, slot = 1; j < dim; ++j) {
            if (j != axis) {
                key[slot++] = std::clamp(static_cast<int>(std::floor((p[j] + 1.0) / delta)), 0, m - 1);
            }
        }
        const double val = v(p);
        auto [it, fresh] = face_min.try_emplace(key, val * val);
        if (!fresh) {
            it->second = std::min(it->second, val * val);
        }
    }
    double cell_sum = 0.0;
    for (const auto& kv : face_min) {
        cell_sum += kv.second;
    }
    sel.delta_sum = std::pow(delta, dim - 1) * cell_sum;
    return sel;
}

BoundCheck check_bound(const RiemannSelection& sel, double oracle_sq_norm, double tol)
{
    BoundCheck b;
    b.lhs = sel.discrete_sum;
    b.rhs = oracle_sq_norm;
    b.holds = b.lhs <= b.rhs * (1.0 + tol);
    b.flagged = !b.holds && sel.delta_sum <= b.rhs * (1.0 + tol);
    b.margin = b.lhs > 0.0 ? b.rhs / b.lhs : std::numeric_limits<double>::infinity();
    return b;
}

Matrix discrete_gram(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, const PointSet& y,
                     const PointSet& z, const Vector& w, double theta)
{
    require(w.size() == y.size() + z.size(), "discrete_gram: weight length must equal |Y| + |Z|");
    const Matrix by = row_scaled(operator_matrix(spec, op, y, x), w.head(y.size()));
    const Matrix bz = row_scaled(theta * kernel_matrix(spec, z, x), w.tail(z.size()));
    return gram(by) + gram(bz);
}

Matrix continuous_gram(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, double theta,
                       const QuadratureRule& quad)
{
    const Matrix by = row_scaled(operator_matrix(spec, op, quad.nodes, x), quad.weights);
    const Matrix bz = row_scaled(theta * kernel_matrix(spec, quad.boundary_nodes, x), quad.boundary_weights);
    return gram(by) + gram(bz);
}

Matrix h2_gram(const MaternSpec& spec, const PointSet& x, const QuadratureRule& quad)
{
    const int d = spec.dim();
    const int components = 1 + d + d * (d + 1) / 2;
    const Eigen::Index nq = quad.nodes.size();
    std::vector<Matrix> blocks(static_cast<std::size_t>(components), Matrix(nq, x.size()));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const Point xj = x.point(j);
        for (Eigen::Index i = 0; i < nq; ++i) {
            const KernelJet jet = matern_jet(spec, quad.nodes[i], xj);
            int c = 0;
            blocks[c++](i, j) = jet.value;
            for (int a = 0; a < d; ++a) {
                blocks[c++](i, j) = jet.gradient[a];
            }
            for (int a = 0; a < d; ++a) {
                for (int b = a; b < d; ++b) {
                    blocks[c++](i, j) = jet.hessian(a, b);
                }
            }
        }
    }
    Matrix g = Matrix::Zero(x.size(), x.size());
    for (const Matrix& blk : blocks) {
        g += gram(row_scaled(blk, quad.weights));
    }
    return g;
}

EquivalenceReport norm_equiv_constants(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x,
                                       const PointSet& y, const PointSet& z, const Vector& w, double theta,
                                       const QuadratureRule& fine_quad, double h_x)
{
    const Matrix gw = discrete_gram(spec, op, x, y, z, w, theta);
    const Matrix gc = continuous_gram(spec, op, x, theta, fine_quad);
    const auto [lo, hi] = gen_eig_extremes(gw, gc);
    require(lo > 0.0, "norm_equiv_constants: discrete Gram is singular on the trial space");
    EquivalenceReport rep;
    rep.c_low = lo;
    rep.c_high = hi;
    rep.spread = hi / lo;
    rep.h_x = h_x;
    rep.n_y = y.size();
    return rep;
}

double stability_rayleigh(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, double theta,
                          const QuadratureRule& fine_quad, int q)
{
    require(q == 0, "stability_rayleigh: only q = 0 is implemented");
    const Matrix gc = continuous_gram(spec, op, x, theta, fine_quad);
    const Matrix h2 = h2_gram(spec, x, fine_quad);
    return gen_eig_extremes(gc, h2).first;
}

} // namespace kcoll
