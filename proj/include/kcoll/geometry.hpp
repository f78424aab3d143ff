#ifndef KCOLL_GEOMETRY_HPP
#define KCOLL_GEOMETRY_HPP

#include "kcoll/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace kcoll {

inline constexpr double kDedupTol = 1e-12;
inline constexpr double kBoundaryTol = 1e-12;
inline constexpr int kDefaultProbeN = 512;

enum class PointKind { interior_or_mixed, boundary_only };

/// An ordered set of points in [-1,1]^d, stored one point per column.
///
/// Construction validates dimension, finiteness and (for boundary-only
/// sets) that each point lies on a face of the box. The dedup invariant is
/// established by the generators and by unique_points(); it is not
/// re-checked here because the check is O(N log N) with a spatial index.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(Matrix coords, PointKind kind = PointKind::interior_or_mixed);

    int dim() const { return static_cast<int>(coords_.rows()); }
    Eigen::Index size() const { return coords_.cols(); }
    bool empty() const { return coords_.cols() == 0; }
    PointKind kind() const { return kind_; }

    const Matrix& coords() const { return coords_; }
    auto operator[](Eigen::Index i) const { return coords_.col(i); }
    Point point(Eigen::Index i) const { return coords_.col(i); }

private:
    Matrix coords_;
    PointKind kind_ = PointKind::interior_or_mixed;
};

/// max-norm of p equals 1 within kBoundaryTol.
template <typename Derived>
bool on_box_boundary(const Eigen::MatrixBase<Derived>& p)
{
    return std::abs(p.cwiseAbs().maxCoeff() - 1.0) <= kBoundaryTol;
}

enum class TransformTag { identity, sine, signed_square, custom };

/// Componentwise map of [-1,1] onto itself.
struct TransformKind {
    TransformTag tag = TransformTag::identity;
    std::function<double(double)> custom;

    static TransformKind identity() { return {TransformTag::identity, {}}; }
    static TransformKind sine() { return {TransformTag::sine, {}}; }
    static TransformKind signed_square() { return {TransformTag::signed_square, {}}; }
    static TransformKind make_custom(std::function<double(double)> f) { return {TransformTag::custom, std::move(f)}; }

    double operator()(double t) const;
};

TransformKind parse_transform(const std::string& name);
std::string to_string(const TransformKind& t);

struct MeshMetrics {
    double fill_h = 0.0;
    double separation_q = 0.0;
    double mesh_ratio_rho = 0.0;
};

struct BoundarySplit {
    PointSet all;       // the full input set, Y = T(P)
    PointSet boundary;  // Z = T(P) restricted to the box faces
};

/// Uniform bucket grid for nearest-neighbour queries on a fixed point set.
class PointLocator {
public:
    explicit PointLocator(const PointSet& points);

    /// Index of the nearest point to q, skipping `exclude` (pass -1 for none).
    Eigen::Index nearest(const Point& q, Eigen::Index exclude = -1) const;
    double nearest_distance(const Point& q, Eigen::Index exclude = -1) const;
    bool any_within(const Point& q, double radius) const;

private:
    std::array<int, kMaxDim> cell_of(const Point& q) const;
    std::size_t flat(const std::array<int, kMaxDim>& c) const;

    Matrix coords_;
    int dim_;
    Point lo_;
    double cell_ = 1.0;
    std::array<int, kMaxDim> n_cells_{1, 1, 1};
    std::vector<std::size_t> start_;
    std::vector<Eigen::Index> items_;
};

/// n_per_axis^dim equispaced points on the closed box, lexicographic with the
/// first coordinate varying slowest.
PointSet tensor_grid(int n_per_axis, int dim);

PointSet apply_transform(const TransformKind& t, const PointSet& p);

BoundarySplit boundary_subset(const PointSet& p);

/// Brute-force fill distance of `p` over the given probe set.
double fill_distance(const PointSet& p, const PointSet& probes);

/// Fill distance over a probe_n-per-axis tensor grid on the closed box, or on
/// the box faces for boundary-only sets (chordal metric).
double fill_distance(const PointSet& p, int probe_n = kDefaultProbeN);

double separation_distance(const PointSet& p);

MeshMetrics mesh_metrics(const PointSet& p, int probe_n = kDefaultProbeN);

/// Per-axis count k = ceil(sqrt(gamma * n_x)), smallest k with k^2 >= gamma * n_x.
int oversample_axis(double gamma, long n_x);
long oversample_counts(double gamma, long n_x);

/// Euclidean closest point on the boundary of [-1,1]^d. Ties go to the face
/// of smallest coordinate index, and on that axis to the +1 face.
Point closest_point_square(const Point& x);

/// Euclidean distance from x to the boundary of [-1,1]^d.
double distance_to_box_boundary(const Point& x);

/// Removes points closer than tol to an earlier point; order is preserved.
PointSet unique_points(const PointSet& p, double tol = kDedupTol);

/// Concatenates a and b and removes near-duplicates.
PointSet merge(const PointSet& a, const PointSet& b);

struct CloudOptions {
    double strip_fraction = 0.5;  // share of points placed inside the strip
    double spacing_factor = 0.6;  // min spacing = factor * sqrt(area / count)
    int max_attempts_per_point = 400;
};

/// Seeded 2-D cloud strictly inside the box, densified in the strip
/// |n . x| <= width / 2 around the line through the origin with normal n.
PointSet scattered_cloud_near_line(int n_target, const Eigen::Vector2d& line_normal, double width,
                                   std::uint64_t seed, const CloudOptions& opts = {});

} // namespace kcoll

#endif // KCOLL_GEOMETRY_HPP
