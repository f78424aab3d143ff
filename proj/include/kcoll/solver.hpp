#ifndef KCOLL_SOLVER_HPP
#define KCOLL_SOLVER_HPP

#include "kcoll/types.hpp"

#include <utility>

namespace kcoll {

/// Pivots below this fraction of the largest are treated as zero.
inline constexpr double kTruncationThreshold = 1e-14;

struct LstsqResult {
    Vector coeffs;
    double residual_norm = 0.0;
    Eigen::Index rank_estimate = 0;
    bool truncated = false;
};

/// min |A x - b|_2 by column-pivoted Householder QR. Columns whose pivot
/// falls below kTruncationThreshold are dropped (coefficient 0) and the
/// result is flagged as truncated.
LstsqResult solve_lstsq(const Matrix& design, const Vector& rhs);

/// sigma_max / sigma_min from a full SVD; +inf when sigma_min < eps * sigma_max.
double cond2(const Matrix& m);

/// Extreme eigenvalues of the pencil g1 v = lambda g2 v, g2 symmetric
/// positive definite. One diagonal jitter of 1e-12 * trace / n is tried if
/// the first Cholesky fails. lambda_min is clamped at 0.
std::pair<double, double> gen_eig_extremes(const Matrix& g1, const Matrix& g2);

/// All eigenvalues of the pencil, ascending.
Vector gen_eigenvalues(const Matrix& g1, const Matrix& g2);

} // namespace kcoll

#endif // KCOLL_SOLVER_HPP
