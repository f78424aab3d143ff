#ifndef KCOLL_TYPES_HPP
#define KCOLL_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kcoll {

// Ambient dimensions supported everywhere in the library.
inline constexpr int kMaxDim = 3;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Small fixed-capacity types: no heap traffic in the kernel hot loops.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Thrown when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot produce a trustworthy result
/// (indefinite Gram, non-convergent solve, infeasible rejection sampling).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) {
        throw InvalidArgument(what);
    }
}

} // namespace kcoll

#endif // KCOLL_TYPES_HPP
