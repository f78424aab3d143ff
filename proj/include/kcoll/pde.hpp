#ifndef KCOLL_PDE_HPP
#define KCOLL_PDE_HPP

#include "kcoll/elliptic.hpp"
#include "kcoll/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace kcoll {

/// Manufactured solution with analytic first and second derivatives.
struct ExactSolution {
    std::function<double(const Point&)> u;
    std::function<Point(const Point&)> grad_u;
    std::function<SmallMatrix(const Point&)> hess_u;
};

/// L u = f in (-1,1)^d, u = g on the boundary.
struct EllipticProblem {
    std::string name;
    EllipticOperator op;
    std::function<double(const Point&)> f;
    std::function<double(const Point&)> g;
    std::optional<ExactSolution> exact;
};

enum class ProblemId { pde1, pde2, pde3, pde4 };

/// The four benchmark problems on (-1,1)^2.
///
/// pde1, pde3: L u = Laplace(u) - u, sech-sum and Gaussian solutions.
/// pde2, pde4: div(k grad u) with k = -arctan(100(x+y)) - 3 pi / 4, collocated in
///             the expanded strong form; pde4 has f = 1, g = 0 and no exact solution.
EllipticProblem make_problem(ProblemId which, const Eigen::Vector2d& pde3_center = Eigen::Vector2d(0.0, 0.0));

/// Accepts "1".."4", "pde1".."pde4"; "3s" / "pde3-offset" give pde3 centred at (0.5, 0.75).
EllipticProblem make_problem(const std::string& name);
ProblemId parse_problem_id(const std::string& name);

/// L u*(x) from the analytic jet of the exact solution.
double manufactured_source(const EllipticProblem& prob, const Point& x);

/// sum a_ij H_ij - b . grad - c * value.
double apply_operator(const OperatorCoefficients& coef, double value, const Point& grad, const SmallMatrix& hess);

/// Diffusion coefficient shared by pde2 and pde4, and its gradient.
double layered_diffusion(const Point& x);
Point layered_diffusion_grad(const Point& x);

} // namespace kcoll

#endif // KCOLL_PDE_HPP
