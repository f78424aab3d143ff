#include "kcoll/pde.hpp"

#include <cmath>
#include <numbers>

namespace kcoll {

namespace {

constexpr double kPi = std::numbers::pi;

double sech(double t) { return 1.0 / std::cosh(t); }

// u* = sech(pi (x - 0.5)) + sech(pi (y - 0.75))
ExactSolution sech_sum()
{
    static constexpr double shift[2] = {0.5, 0.75};
    ExactSolution e;
    e.u = [](const Point& p) { return sech(kPi * (p[0] - shift[0])) + sech(kPi * (p[1] - shift[1])); };
    e.grad_u = [](const Point& p) {
        Point g(2);
        for (int k = 0; k < 2; ++k) {
            const double a = kPi * (p[k] - shift[k]);
            g[k] = -kPi * sech(a) * std::tanh(a);
        }
        return g;
    };
    e.hess_u = [](const Point& p) {
        SmallMatrix h = SmallMatrix::Zero(2, 2);
        for (int k = 0; k < 2; ++k) {
            const double a = kPi * (p[k] - shift[k]);
            const double th = std::tanh(a);
            h(k, k) = kPi * kPi * sech(a) * (2.0 * th * th - 1.0);
        }
        return h;
    };
    return e;
}

// u* = (1 - x^2) cos(pi y / 2)
ExactSolution parabola_cosine()
{
    ExactSolution e;
    e.u = [](const Point& p) { return (1.0 - p[0] * p[0]) * std::cos(kPi * p[1] / 2.0); };
    e.grad_u = [](const Point& p) {
        const double c = std::cos(kPi * p[1] / 2.0);
        const double s = std::sin(kPi * p[1] / 2.0);
        Point g(2);
        g << -2.0 * p[0] * c, -(kPi / 2.0) * (1.0 - p[0] * p[0]) * s;
        return g;
    };
    e.hess_u = [](const Point& p) {
        const double c = std::cos(kPi * p[1] / 2.0);
        const double s = std::sin(kPi * p[1] / 2.0);
        SmallMatrix h(2, 2);
        h(0, 0) = -2.0 * c;
        h(0, 1) = h(1, 0) = kPi * p[0] * s;
        h(1, 1) = -(kPi * kPi / 4.0) * (1.0 - p[0] * p[0]) * c;
        return h;
    };
    return e;
}

// u* = exp(-10 |x - x0|^2)
ExactSolution gaussian(const Eigen::Vector2d& center)
{
    ExactSolution e;
    e.u = [center](const Point& p) { return std::exp(-10.0 * (p - center).squaredNorm()); };
    e.grad_u = [center](const Point& p) {
        const Point d = p - center;
        return Point(-20.0 * std::exp(-10.0 * d.squaredNorm()) * d);
    };
    e.hess_u = [center](const Point& p) {
        const Point d = p - center;
        const double u = std::exp(-10.0 * d.squaredNorm());
        SmallMatrix h = 400.0 * d * d.transpose();
        h.diagonal().array() -= 20.0;
        return SmallMatrix(u * h);
    };
    return e;
}

EllipticProblem with_exact(std::string name, EllipticOperator op, ExactSolution exact)
{
    EllipticProblem p;
    p.name = std::move(name);
    p.op = std::move(op);
    p.exact = std::move(exact);
    const EllipticOperator op_copy = p.op;
    const ExactSolution ex = *p.exact;
    p.f = [op_copy, ex](const Point& x) {
        return apply_operator(op_copy.at(x), ex.u(x), ex.grad_u(x), ex.hess_u(x));
    };
    p.g = ex.u;
    return p;
}

EllipticOperator layered_operator()
{
    return EllipticOperator::divergence_form(2, layered_diffusion, layered_diffusion_grad);
}

} // namespace

double layered_diffusion(const Point& x) { return -std::atan(100.0 * (x[0] + x[1])) - 3.0 * kPi / 4.0; }

Point layered_diffusion_grad(const Point& x)
{
    const double t = 100.0 * (x[0] + x[1]);
    const double dk = -100.0 / (1.0 + t * t);
    Point g(2);
    g << dk, dk;
    return g;
}

double apply_operator(const OperatorCoefficients& coef, double value, const Point& grad, const SmallMatrix& hess)
{
    return coef.a.cwiseProduct(hess).sum() - coef.b.dot(grad) - coef.c * value;
}

EllipticProblem make_problem(ProblemId which, const Eigen::Vector2d& pde3_center)
{
    switch (which) {
    case ProblemId::pde1:
        return with_exact("pde1", EllipticOperator::modified_helmholtz(2), sech_sum());
    case ProblemId::pde2:
        return with_exact("pde2", layered_operator(), parabola_cosine());
    case ProblemId::pde3: {
        require(pde3_center.cwiseAbs().maxCoeff() <= 1.0, "make_problem: pde3 center must lie in the closed box");
        const bool origin = pde3_center.isZero(0.0);
        return with_exact(origin ? "pde3" : "pde3-offset", EllipticOperator::modified_helmholtz(2),
                          gaussian(pde3_center));
    }
    case ProblemId::pde4: {
        EllipticProblem p;
        p.name = "pde4";
        p.op = layered_operator();
        p.f = [](const Point&) { return 1.0; };
        p.g = [](const Point&) { return 0.0; };
        return p;
    }
    }
    throw InvalidArgument("make_problem: unknown problem");
}

ProblemId parse_problem_id(const std::string& name)
{
    if (name == "1" || name == "pde1") {
        return ProblemId::pde1;
    }
    if (name == "2" || name == "pde2") {
        return ProblemId::pde2;
    }
    if (name == "3" || name == "pde3" || name == "3s" || name == "pde3-offset") {
        return ProblemId::pde3;
    }
    if (name == "4" || name == "pde4") {
        return ProblemId::pde4;
    }
    throw InvalidArgument("unknown problem: " + name);
}

EllipticProblem make_problem(const std::string& name)
{
    const ProblemId id = parse_problem_id(name);
    if (name == "3s" || name == "pde3-offset") {
        return make_problem(id, Eigen::Vector2d(0.5, 0.75));
    }
    return make_problem(id);
}

double manufactured_source(const EllipticProblem& prob, const Point& x)
{
    if (!prob.exact) {
        throw InvalidArgument("manufactured_source: problem " + prob.name + " has no exact solution");
    }
    const ExactSolution& e = *prob.exact;
    return apply_operator(prob.op.at(x), e.u(x), e.grad_u(x), e.hess_u(x));
}

} // namespace kcoll
