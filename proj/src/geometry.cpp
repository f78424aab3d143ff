#include "kcoll/geometry.hpp"

#include "kcoll/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace kcoll {

PointSet::PointSet(Matrix coords, PointKind kind) : coords_(std::move(coords)), kind_(kind)
{
    require(coords_.rows() >= 1 && coords_.rows() <= kMaxDim, "PointSet: dimension must be 1, 2 or 3");
    require(coords_.allFinite(), "PointSet: coordinates must be finite");
    if (kind_ == PointKind::boundary_only) {
        for (Eigen::Index i = 0; i < coords_.cols(); ++i) {
            require(on_box_boundary(coords_.col(i)), "PointSet: boundary-only set has a point off the box faces");
        }
    }
}

double TransformKind::operator()(double t) const
{
    switch (tag) {
    case TransformTag::identity:
        return t;
    case TransformTag::sine:
        // sin(pi/2 * +-1) is not exactly +-1 in floating point everywhere; pin the fixed points.
        if (t == 1.0 || t == -1.0 || t == 0.0) {
            return t;
        }
        return std::sin(std::numbers::pi * t / 2.0);
    case TransformTag::signed_square:
        return t < 0.0 ? -t * t : t * t;
    case TransformTag::custom:
        return custom(t);
    }
    return t;
}

TransformKind parse_transform(const std::string& name)
{
    if (name == "identity" || name == "none") {
        return TransformKind::identity();
    }
    if (name == "sine") {
        return TransformKind::sine();
    }
    if (name == "signed-square" || name == "signed_square") {
        return TransformKind::signed_square();
    }
    throw InvalidArgument("unknown transform: " + name);
}

std::string to_string(const TransformKind& t)
{
    switch (t.tag) {
    case TransformTag::identity:
        return "identity";
    case TransformTag::sine:
        return "sine";
    case TransformTag::signed_square:
        return "signed-square";
    case TransformTag::custom:
        return "custom";
    }
    return "custom";
}

// ---------------------------------------------------------------------------
// PointLocator

PointLocator::PointLocator(const PointSet& points) : coords_(points.coords()), dim_(points.dim())
{
    const Eigen::Index n = coords_.cols();
    lo_ = Point::Zero(dim_);
    Point hi = Point::Zero(dim_);
    if (n > 0) {
        lo_ = coords_.rowwise().minCoeff();
        hi = coords_.rowwise().maxCoeff();
    }
    const Point extent = hi - lo_;
    const double longest = std::max(extent.maxCoeff(), 1e-300);
    double volume = 1.0;
    int live_dims = 0;
    for (int k = 0; k < dim_; ++k) {
        if (extent[k] > 1e-9 * longest) {
            volume *= extent[k];
            ++live_dims;
        }
    }
    if (n <= 1 || live_dims == 0) {
        cell_ = 1.0;
    } else {
        cell_ = std::pow(volume / static_cast<double>(n), 1.0 / live_dims);
        // cap the cell count for very anisotropic sets
        cell_ = std::max(cell_, longest / 4096.0);
    }
    for (int k = 0; k < dim_; ++k) {
        n_cells_[k] = std::max(1, static_cast<int>(std::floor(extent[k] / cell_)) + 1);
    }

    std::vector<std::size_t> owner(static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (int k = 0; k < dim_; ++k) {
        total *= static_cast<std::size_t>(n_cells_[k]);
    }
    start_.assign(total + 1, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        owner[i] = flat(cell_of(coords_.col(i)));
        ++start_[owner[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) {
        start_[c + 1] += start_[c];
    }
    items_.resize(static_cast<std::size_t>(n));
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        items_[fill[owner[i]]++] = i;
    }
}

std::array<int, kMaxDim> PointLocator::cell_of(const Point& q) const
{
    std::array<int, kMaxDim> c{0, 0, 0};
    for (int k = 0; k < dim_; ++k) {
        const int idx = static_cast<int>(std::floor((q[k] - lo_[k]) / cell_));
        c[k] = std::clamp(idx, 0, n_cells_[k] - 1);
    }
    return c;
}

std::size_t PointLocator::flat(const std::array<int, kMaxDim>& c) const
{
    std::size_t f = 0;
    for (int k = 0; k < dim_; ++k) {
        f = f * static_cast<std::size_t>(n_cells_[k]) + static_cast<std::size_t>(c[k]);
    }
    return f;
}

Eigen::Index PointLocator::nearest(const Point& q, Eigen::Index exclude) const
{
    Eigen::Index best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const auto home = cell_of(q);
    int max_ring = 0;
    for (int k = 0; k < dim_; ++k) {
        max_ring = std::max(max_ring, n_cells_[k]);
    }

    std::array<int, kMaxDim> lo{0, 0, 0};
    std::array<int, kMaxDim> hi{0, 0, 0};
    for (int ring = 0; ring <= max_ring; ++ring) {
        for (int k = 0; k < dim_; ++k) {
            lo[k] = home[k] - ring;
            hi[k] = home[k] + ring;
        }
        std::array<int, kMaxDim> c{0, 0, 0};
        // iterate over the cube shell at Chebyshev distance `ring`
        for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
            for (c[1] = (dim_ > 1 ? lo[1] : 0); c[1] <= (dim_ > 1 ? hi[1] : 0); ++c[1]) {
                for (c[2] = (dim_ > 2 ? lo[2] : 0); c[2] <= (dim_ > 2 ? hi[2] : 0); ++c[2]) {
                    bool on_shell = false;
                    bool inside = true;
                    for (int k = 0; k < dim_; ++k) {
                        if (std::abs(c[k] - home[k]) == ring) {
                            on_shell = true;
                        }
                        if (c[k] < 0 || c[k] >= n_cells_[k]) {
                            inside = false;
                        }
                    }
                    if (!on_shell || !inside) {
                        continue;
                    }
                    const std::size_t f = flat(c);
                    for (std::size_t it = start_[f]; it < start_[f + 1]; ++it) {
                        const Eigen::Index i = items_[it];
                        if (i == exclude) {
                            continue;
                        }
                        const double d2 = (coords_.col(i) - q).squaredNorm();
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = i;
                        }
                    }
                }
            }
        }
        const double reach = ring * cell_;
        if (best >= 0 && best_d2 <= reach * reach) {
            break;
        }
    }
    return best;
}

double PointLocator::nearest_distance(const Point& q, Eigen::Index exclude) const
{
    const Eigen::Index i = nearest(q, exclude);
    if (i < 0) {
        return std::numeric_limits<double>::infinity();
    }
    return (coords_.col(i) - q).norm();
}

bool PointLocator::any_within(const Point& q, double radius) const
{
    if (coords_.cols() == 0) {
        return false;
    }
    return nearest_distance(q) < radius;
}

// ---------------------------------------------------------------------------
// generators

PointSet tensor_grid(int n_per_axis, int dim)
{
    require(n_per_axis >= 2, "tensor_grid: n_per_axis must be >= 2");
    require(dim >= 1 && dim <= kMaxDim, "tensor_grid: dim must be 1, 2 or 3");

    Vector axis(n_per_axis);
    for (int i = 0; i < n_per_axis; ++i) {
        axis[i] = -1.0 + 2.0 * i / (n_per_axis - 1);
    }
    axis[n_per_axis - 1] = 1.0;

    Eigen::Index total = 1;
    for (int k = 0; k < dim; ++k) {
        total *= n_per_axis;
    }
    Matrix coords(dim, total);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rem = idx;
        for (int k = dim - 1; k >= 0; --k) {
            coords(k, idx) = axis[rem % n_per_axis];
            rem /= n_per_axis;
        }
    }
    return PointSet(std::move(coords));
}

PointSet apply_transform(const TransformKind& t, const PointSet& p)
{
    Matrix out = p.coords();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double v = out.data()[i];
        require(std::abs(v) <= 1.0 + 1e-12, "apply_transform: coordinate outside [-1,1]");
        out.data()[i] = t(std::clamp(v, -1.0, 1.0));
    }
    return PointSet(std::move(out), p.kind());
}

BoundarySplit boundary_subset(const PointSet& p)
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (on_box_boundary(p[i])) {
            idx.push_back(i);
        }
    }
    Matrix z(p.dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        z.col(static_cast<Eigen::Index>(k)) = p[idx[k]];
    }
    return {p, PointSet(std::move(z), PointKind::boundary_only)};
}

// ---------------------------------------------------------------------------
// metrics

double fill_distance(const PointSet& p, const PointSet& probes)
{
    require(!p.empty(), "fill_distance: empty point set");
    require(p.dim() == probes.dim(), "fill_distance: dimension mismatch");
    const PointLocator locator(p);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < probes.size(); ++i) {
        worst = std::max(worst, locator.nearest_distance(probes.point(i)));
    }
    return worst;
}

double fill_distance(const PointSet& p, int probe_n)
{
    require(!p.empty(), "fill_distance: empty point set");
    require(probe_n >= 2, "fill_distance: probe_n must be >= 2");
    const PointSet grid = tensor_grid(probe_n, p.dim());
    if (p.kind() == PointKind::boundary_only) {
        return fill_distance(p, boundary_subset(grid).boundary);
    }
    return fill_distance(p, grid);
}

double separation_distance(const PointSet& p)
{
    require(!p.empty(), "separation_distance: empty point set");
    require(p.size() >= 2, "separation_distance: undefined for a single point");
    const PointLocator locator(p);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        best = std::min(best, locator.nearest_distance(p.point(i), i));
    }
    return 0.5 * best;
}

MeshMetrics mesh_metrics(const PointSet& p, int probe_n)
{
    require(!p.empty(), "mesh_metrics: empty point set");
    require(p.size() >= 2, "mesh_metrics: separation undefined for a single point");
    MeshMetrics m;
    m.fill_h = fill_distance(p, probe_n);
    m.separation_q = separation_distance(p);
    require(m.separation_q > 0.0, "mesh_metrics: coincident points");
    m.mesh_ratio_rho = m.fill_h / m.separation_q;
    return m;
}

int oversample_axis(double gamma, long n_x)
{
    require(gamma >= 1.0, "oversample_counts: gamma must be >= 1");
    require(n_x >= 1, "oversample_counts: n_x must be positive");
    const auto root = static_cast<long>(std::llround(std::sqrt(static_cast<double>(n_x))));
    require(root * root == n_x, "oversample_counts: n_x must be a perfect square");

    const double target = gamma * static_cast<double>(n_x);
    auto k = static_cast<long>(std::ceil(std::sqrt(target)));
    while (k > 1 && static_cast<double>((k - 1) * (k - 1)) >= target) {
        --k;
    }
    while (static_cast<double>(k * k) < target) {
        ++k;
    }
    return static_cast<int>(k);
}

long oversample_counts(double gamma, long n_x)
{
    const long k = oversample_axis(gamma, n_x);
    return k * k;
}

Point closest_point_square(const Point& x)
{
    const int d = static_cast<int>(x.size());
    bool outside = false;
    Point clamped = x;
    for (int k = 0; k < d; ++k) {
        if (x[k] > 1.0 || x[k] < -1.0) {
            outside = true;
            clamped[k] = std::clamp(x[k], -1.0, 1.0);
        }
    }
    if (outside) {
        return clamped;
    }
    int best_axis = 0;
    double best_sign = 1.0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) {
        const double to_plus = 1.0 - x[k];
        const double to_minus = 1.0 + x[k];
        if (to_plus < best_dist) {
            best_dist = to_plus;
            best_axis = k;
            best_sign = 1.0;
        }
        if (to_minus < best_dist) {
            best_dist = to_minus;
            best_axis = k;
            best_sign = -1.0;
        }
    }
    Point out = x;
    out[best_axis] = best_sign;
    return out;
}

double distance_to_box_boundary(const Point& x)
{
    return (closest_point_square(x) - x).norm();
}

PointSet unique_points(const PointSet& p, double tol)
{
    if (p.size() <= 1) {
        return p;
    }
    // incremental dedup against already-kept points, bucketed on a coarse lattice
    const double cell = std::max(tol, 1e-9);
    const int d = p.dim();
    const auto key_of = [&](const std::array<long long, kMaxDim>& c) {
        std::uint64_t h = 0;
        for (int k = 0; k < d; ++k) {
            h = splitmix64(h ^ static_cast<std::uint64_t>(c[k]));
        }
        return h;
    };
    std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> buckets;
    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::array<long long, kMaxDim> home{0, 0, 0};
        for (int k = 0; k < d; ++k) {
            home[k] = static_cast<long long>(std::floor(p.coords()(k, i) / cell));
        }
        bool duplicate = false;
        std::array<long long, kMaxDim> c{0, 0, 0};
        for (int a = -1; a <= 1 && !duplicate; ++a) {
            for (int b = (d > 1 ? -1 : 0); b <= (d > 1 ? 1 : 0) && !duplicate; ++b) {
                for (int e = (d > 2 ? -1 : 0); e <= (d > 2 ? 1 : 0) && !duplicate; ++e) {
                    c = {home[0] + a, home[1] + b, home[2] + e};
                    const auto it = buckets.find(key_of(c));
                    if (it == buckets.end()) {
                        continue;
                    }
                    for (Eigen::Index j : it->second) {
                        if ((p[j] - p[i]).norm() <= tol) {
                            duplicate = true;
                            break;
                        }
                    }
                }
            }
        }
        if (!duplicate) {
            buckets[key_of(home)].push_back(i);
            keep.push_back(i);
        }
    }
    Matrix out(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = p[keep[k]];
    }
    return PointSet(std::move(out), p.kind());
}

PointSet merge(const PointSet& a, const PointSet& b)
{
    require(a.dim() == b.dim() || a.empty() || b.empty(), "merge: dimension mismatch");
    if (a.empty()) {
        return unique_points(b);
    }
    if (b.empty()) {
        return unique_points(a);
    }
    Matrix c(a.dim(), a.size() + b.size());
    c << a.coords(), b.coords();
    const PointKind kind = (a.kind() == PointKind::boundary_only && b.kind() == PointKind::boundary_only)
                               ? PointKind::boundary_only
                               : PointKind::interior_or_mixed;
    return unique_points(PointSet(std::move(c), kind));
}

// ---------------------------------------------------------------------------
// scattered cloud

PointSet scattered_cloud_near_line(int n_target, const Eigen::Vector2d& line_normal, double width, std::uint64_t seed,
                                   const CloudOptions& opts)
{
    require(n_target >= 1, "scattered_cloud_near_line: n_target must be >= 1");
    require(width > 0.0, "scattered_cloud_near_line: width must be positive");
    require(line_normal.norm() > 0.0, "scattered_cloud_near_line: zero line normal");
    require(opts.strip_fraction > 0.0 && opts.strip_fraction < 1.0,
            "scattered_cloud_near_line: strip_fraction must lie in (0,1)");
    const Eigen::Vector2d n = line_normal.normalized();
    const auto in_strip = [&](const Eigen::Vector2d& x) { return std::abs(n.dot(x)) <= 0.5 * width; };

    // strip area by a deterministic midpoint count
    constexpr int kAreaGrid = 1000;
    long hits = 0;
    for (int i = 0; i < kAreaGrid; ++i) {
        for (int j = 0; j < kAreaGrid; ++j) {
            const Eigen::Vector2d x(-1.0 + (i + 0.5) * 2.0 / kAreaGrid, -1.0 + (j + 0.5) * 2.0 / kAreaGrid);
            hits += in_strip(x) ? 1 : 0;
        }
    }
    const double area_in = 4.0 * static_cast<double>(hits) / (kAreaGrid * kAreaGrid);
    const double area_out = 4.0 - area_in;
    require(area_in > 0.0 && area_out > 0.0, "scattered_cloud_near_line: strip covers none or all of the box");

    const int n_in = std::max(1, static_cast<int>(std::lround(opts.strip_fraction * n_target)));
    const int n_out = n_target - n_in;
    const double r_in = opts.spacing_factor * std::sqrt(area_in / n_in);
    const double r_out = n_out > 0 ? opts.spacing_factor * std::sqrt(area_out / n_out) : r_in;

    Rng rng(seed);
    std::vector<Eigen::Vector2d> accepted;
    accepted.reserve(static_cast<std::size_t>(n_target));

    // bucket grid keyed on the smaller radius
    const double cell = std::min(r_in, r_out);
    const int nc = std::max(1, static_cast<int>(std::ceil(2.0 / cell)));
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nc) * nc);
    const auto bucket_of = [&](const Eigen::Vector2d& x) {
        const int i = std::clamp(static_cast<int>((x[0] + 1.0) / cell), 0, nc - 1);
        const int j = std::clamp(static_cast<int>((x[1] + 1.0) / cell), 0, nc - 1);
        return std::pair{i, j};
    };
    const auto too_close = [&](const Eigen::Vector2d& x, double r) {
        const auto [bi, bj] = bucket_of(x);
        const int reach = static_cast<int>(std::ceil(r / cell));
        for (int i = std::max(0, bi - reach); i <= std::min(nc - 1, bi + reach); ++i) {
            for (int j = std::max(0, bj - reach); j <= std::min(nc - 1, bj + reach); ++j) {
                for (int k : buckets[static_cast<std::size_t>(i) * nc + j]) {
                    if ((accepted[static_cast<std::size_t>(k)] - x).norm() < r) {
                        return true;
                    }
                }
            }
        }
        return false;
    };

    const auto place = [&](int count, bool strip, double r) {
        const double margin = 0.5 * r;
        long attempts = 0;
        const long budget = static_cast<long>(opts.max_attempts_per_point) * std::max(count, 1);
        int placed = 0;
        while (placed < count) {
            if (++attempts > budget) {
                throw NumericalError("scattered_cloud_near_line: spacing infeasible, rejection budget exhausted");
            }
            const Eigen::Vector2d x(rng.uniform(-1.0 + margin, 1.0 - margin), rng.uniform(-1.0 + margin, 1.0 - margin));
            if (in_strip(x) != strip || too_close(x, r)) {
                continue;
            }
            const auto [bi, bj] = bucket_of(x);
            buckets[static_cast<std::size_t>(bi) * nc + bj].push_back(static_cast<int>(accepted.size()));
            accepted.push_back(x);
            ++placed;
        }
    };
    place(n_in, true, r_in);
    place(n_out, false, r_out);

    Matrix coords(2, n_target);
    for (int i = 0; i < n_target; ++i) {
        coords.col(i) = accepted[static_cast<std::size_t>(i)];
    }
    return PointSet(std::move(coords));
}

} // namespace kcoll
