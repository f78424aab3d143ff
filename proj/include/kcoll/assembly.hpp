#ifndef KCOLL_ASSEMBLY_HPP
#define KCOLL_ASSEMBLY_HPP

#include "kcoll/geometry.hpp"
#include "kcoll/matern.hpp"
#include "kcoll/pde.hpp"
#include "kcoll/types.hpp"

#include <cstdint>
#include <string>

namespace kcoll {

enum class WeightTag { identity, random, trapezoid };

struct WeightScheme {
    WeightTag tag = WeightTag::identity;
    std::uint64_t seed = 0;

    static WeightScheme identity() { return {WeightTag::identity, 0}; }
    static WeightScheme random(std::uint64_t seed) { return {WeightTag::random, seed}; }
    static WeightScheme trapezoid() { return {WeightTag::trapezoid, 0}; }
};

std::string to_string(const WeightScheme& w);

struct SystemMeta {
    Eigen::Index n_x = 0;
    Eigen::Index n_y = 0;
    Eigen::Index n_z = 0;
};

/// Overdetermined collocation system
///
///   [ L Phi(Y, X)       ] alpha = [ f(Y)         ]
///   [ theta * Phi(Z, X) ]         [ theta * g(Z) ]
///
/// Rows 0..n_y-1 are operator rows, the remaining n_z rows are boundary rows
/// with theta already applied. After weight_and_scale() every row i carries
/// an extra factor sqrt(row_weights[i]).
struct CollocationSystem {
    Matrix design;
    Vector rhs;
    Vector row_weights;
    double theta = 1.0;
    SystemMeta meta;
};

/// [Phi](P, X): entry (i, j) = Phi(p_i, x_j).
Matrix kernel_matrix(const MaternSpec& spec, const PointSet& p, const PointSet& x);

/// [L Phi](P, X): entry (i, j) = (L Phi(., x_j))(p_i).
Matrix operator_matrix(const MaternSpec& spec, const EllipticOperator& op, const PointSet& p, const PointSet& x);

CollocationSystem assemble_system(const EllipticProblem& prob, const MaternSpec& spec, const PointSet& x,
                                  const PointSet& y, const PointSet& z, double theta);

/// Boundary scaling h^{-3/2}.
double theta_default(double h);

/// Composite trapezoid weights on sorted, possibly nonuniform nodes.
Vector trapezoid_weights_1d(const Vector& nodes);

/// Seeded uniform weights in [0.5, 1.5].
Vector random_weights(Eigen::Index n, std::uint64_t seed);

/// Row weights for [Y; Z]. `y_pre` and `z_pre` are the point sets before the
/// transform `t`; trapezoid weights need `y_pre` to be a tensor grid and
/// `z_pre` a subset of its boundary points.
Vector build_weights(const WeightScheme& scheme, const PointSet& y_pre, const PointSet& z_pre, const TransformKind& t);

/// Scales every row by sqrt(w_i) and records w as row_weights.
CollocationSystem weight_and_scale(CollocationSystem sys, const Vector& w);

/// w_max / w_min.
double weight_condition(const Vector& w);

/// Tensor trapezoid rule on the box: all grid nodes with product weights,
/// plus the boundary nodes with face-wise weights.
struct QuadratureRule {
    PointSet nodes;
    Vector weights;
    PointSet boundary_nodes;
    Vector boundary_weights;
};

QuadratureRule tensor_trapezoid_rule(int n_per_axis, int dim, const TransformKind& t = TransformKind::identity());

} // namespace kcoll

#endif // KCOLL_ASSEMBLY_HPP
