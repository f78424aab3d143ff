#ifndef KCOLL_STABILITY_HPP
#define KCOLL_STABILITY_HPP

#include "kcoll/assembly.hpp"
#include "kcoll/geometry.hpp"
#include "kcoll/matern.hpp"
#include "kcoll/types.hpp"

#include <functional>

namespace kcoll {

using ScalarField = std::function<double(const Point&)>;

inline constexpr int kDefaultSamplesPerCell = 16;
inline constexpr double kBoundTolerance = 1e-3;

/// A point set picked one-per-cell to approximate a lower Riemann sum.
struct RiemannSelection {
    PointSet points;
    double cell_edge_delta = 0.0;
    int cells_per_axis = 0;
    double fill_h_P = 0.0;
    double discrete_sum = 0.0;  // h_P^k * sum v(p)^2, k = d (interior) or d-1 (boundary)
    double delta_sum = 0.0;     // lower Riemann sum on the cell partition (boundary: face cells)
    double band_radius = 0.0;   // boundary selections only
};

/// Cell edge used for a given (C, h): the largest 2/m not exceeding C h, so
/// the cells tile [-1,1]^d exactly.
double aligned_cell_edge(double c, double h, int dim);

/// i-th point (i >= 1) of the Halton sequence in bases 2, 3, 5.
Point halton_point(int i, int dim);

/// Tiles [-1,1]^d with cells of edge delta = aligned_cell_edge(C, h, d) and
/// keeps, in each cell, the candidate minimizing v^2 among `samples_per_cell`
/// Halton points of the cell's central sub-cell. The sub-cell is small enough
/// that fill_h_P < delta; covering gives fill_h_P >= delta / sqrt(pi) in 2-D.
/// fill_h_P is the supremum of the distance function, found by branch and
/// bound.
RiemannSelection lower_riemann_points(const ScalarField& v, double c, double h, int dim,
                                      int samples_per_cell = kDefaultSamplesPerCell);

/// Boundary analogue: selects in the two-sided band of radius C^d h / 2^d
/// around the box boundary using v o cp, projects the picks with
/// closest_point_square and removes duplicates. The same Halton pattern is
/// mapped into every cell-band piece. fill_h_P is the boundary fill distance
/// in the chordal metric.
RiemannSelection boundary_riemann_points(const ScalarField& v, double c, double h, int dim,
                                         int samples_per_cell = kDefaultSamplesPerCell);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool flagged = false;  // fails as stated, holds with the cell-measure sum
    double margin = 0.0;   // rhs / lhs, +inf when lhs == 0
};

BoundCheck check_bound(const RiemannSelection& sel, double oracle_sq_norm, double tol = kBoundTolerance);

struct EquivalenceReport {
    double c_low = 0.0;
    double c_high = 0.0;
    double spread = 0.0;
    double h_x = 0.0;
    Eigen::Index n_y = 0;
};

/// Discrete Gram  B_Y^T W_Y B_Y + theta^2 B_Z^T W_Z B_Z  with B_Y = [L Phi](Y, X),
/// B_Z = [Phi](Z, X).
Matrix discrete_gram(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, const PointSet& y,
                     const PointSet& z, const Vector& w, double theta);

/// Quadrature Gram of |L u|^2_{L2(box)} + theta^2 |u|^2_{L2(boundary)}.
Matrix continuous_gram(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, double theta,
                       const QuadratureRule& quad);

/// Quadrature Gram of the full H^2 inner product, sum over |alpha| <= 2 with
/// unit weights.
Matrix h2_gram(const MaternSpec& spec, const PointSet& x, const QuadratureRule& quad);

/// Extreme eigenvalues of (discrete_gram, continuous_gram). `w` holds the
/// weights of [Y; Z]; `h_x` is recorded in the report.
EquivalenceReport norm_equiv_constants(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x,
                                       const PointSet& y, const PointSet& z, const Vector& w, double theta,
                                       const QuadratureRule& fine_quad, double h_x = 0.0);

/// Smallest eigenvalue of (continuous_gram, h2_gram): the empirical
/// stability constant for q = 0.
double stability_rayleigh(const MaternSpec& spec, const EllipticOperator& op, const PointSet& x, double theta,
                          const QuadratureRule& fine_quad, int q = 0);

} // namespace kcoll

#endif // KCOLL_STABILITY_HPP
