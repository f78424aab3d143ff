#include "kcoll/experiments.hpp"

#include "kcoll/random.hpp"
#include "kcoll/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace kcoll {

std::string to_string(Method m)
{
    switch (m) {
    case Method::vls_tp:
        return "vls-tp";
    case Method::wls_id:
        return "wls-id";
    case Method::wls_rd:
        return "wls-rd";
    }
    return "wls-id";
}

Method parse_method(const std::string& name)
{
    if (name == "vls-tp") {
        return Method::vls_tp;
    }
    if (name == "wls-id") {
        return Method::wls_id;
    }
    if (name == "wls-rd") {
        return Method::wls_rd;
    }
    throw InvalidArgument("unknown method: " + name);
}

std::vector<Method> parse_methods(const std::string& name)
{
    if (name == "all") {
        return {Method::vls_tp, Method::wls_id, Method::wls_rd};
    }
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= name.size()) {
        const std::size_t comma = name.find(',', start);
        const std::string item = name.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_method(item));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

WeightScheme weight_scheme(Method m, std::uint64_t seed)
{
    switch (m) {
    case Method::vls_tp:
        return WeightScheme::trapezoid();
    case Method::wls_id:
        return WeightScheme::identity();
    case Method::wls_rd:
        return WeightScheme::random(seed);
    }
    return WeightScheme::identity();
}

TransformKind default_transform(const std::string& pde)
{
    switch (parse_problem_id(pde)) {
    case ProblemId::pde1:
        return TransformKind::sine();
    case ProblemId::pde2:
    case ProblemId::pde3:
        return TransformKind::signed_square();
    case ProblemId::pde4:
        return TransformKind::identity();
    }
    return TransformKind::identity();
}

double relative_l2(const Vector& u_num, const Vector& u_ref)
{
    require(u_num.size() == u_ref.size() && u_ref.size() > 0, "relative_l2: vectors must have equal nonzero length");
    const double den = u_ref.norm();
    require(den > 0.0, "relative_l2: reference is identically zero");
    return (u_num - u_ref).norm() / den;
}

RateFit fit_loglog(const std::vector<double>& h, const std::vector<double>& err)
{
    require(h.size() == err.size(), "fit_loglog: length mismatch");
    std::vector<double> lx;
    std::vector<double> ly;
    int excluded = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !std::isfinite(h[i]) || !std::isfinite(err[i]) || err[i] < kRoundoffFloor) {
            ++excluded;
            continue;
        }
        lx.push_back(std::log(h[i]));
        ly.push_back(std::log(err[i]));
    }
    const auto n = static_cast<double>(lx.size());
    require(lx.size() >= 2, "fit_loglog: need at least two usable points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    require(sxx > 0.0, "fit_loglog: need two distinct h values");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points_used = static_cast<int>(lx.size());
    fit.points_excluded = excluded;
    return fit;
}

RateFit fit_rate(const std::vector<ConvergenceRecord>& records)
{
    std::vector<double> h;
    std::vector<double> err;
    int dropped = 0;
    for (const auto& r : records) {
        if (!r.ok() || r.truncated) {
            ++dropped;
            continue;
        }
        h.push_back(r.h_x);
        err.push_back(r.rel_l2);
    }
    RateFit fit = fit_loglog(h, err);
    fit.points_excluded += dropped;
    return fit;
}

ProblemSetup make_setup(const RunConfig& cfg)
{
    require(cfg.eval_grid_n >= 2, "make_setup: eval grid needs at least 2 points per axis");
    ProblemSetup s{make_problem(cfg.pde), tensor_grid(cfg.eval_grid_n, 2), Vector()};
    s.u_ref.resize(s.eval_points.size());
    if (s.problem.exact) {
        for (Eigen::Index i = 0; i < s.eval_points.size(); ++i) {
            s.u_ref[i] = s.problem.exact->u(s.eval_points.point(i));
        }
    } else {
        const GridFunction ref = fd_reference_pde4(cfg.reference_n);
        for (Eigen::Index i = 0; i < s.eval_points.size(); ++i) {
            s.u_ref[i] = ref(s.eval_points.point(i));
        }
    }
    return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Layout {
    PointSet y_pre;
    PointSet z_pre;
    PointSet y;
    PointSet z;
    TransformKind t;
};

Layout build_layout(const RunConfig& cfg, const std::string& pde, int n_x_axis, double gamma)
{
    Layout l;
    l.t = cfg.transform ? *cfg.transform : default_transform(pde);
    const long n_x = static_cast<long>(n_x_axis) * n_x_axis;
    const PointSet p = tensor_grid(oversample_axis(gamma, n_x), 2);
    const BoundarySplit split = boundary_subset(p);
    l.y_pre = p;
    l.z_pre = split.boundary;
    if (parse_problem_id(pde) == ProblemId::pde4) {
        const PointSet cloud =
            scattered_cloud_near_line(cfg.cloud.n_points, cfg.cloud.normal, cfg.cloud.width, cfg.seed);
        l.y_pre = merge(p, cloud);
    }
    l.y = apply_transform(l.t, l.y_pre);
    l.z = PointSet(apply_transform(l.t, l.z_pre).coords(), PointKind::boundary_only);
    return l;
}

std::uint64_t weight_seed(std::uint64_t seed, int tau, double gamma, int n_x_axis)
{
    const auto g = static_cast<std::uint64_t>(std::llround(gamma * 1000.0));
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tau) * 1000003ULL + g * 7919ULL +
                                        static_cast<std::uint64_t>(n_x_axis)));
}

struct SolveContext {
    const RunConfig& cfg;
    const ProblemSetup& setup;
    const MaternSpec& spec;
    const PointSet& x;
    double h_x;
    const Matrix& eval_matrix;
};

ConvergenceRecord base_record(const SolveContext& c, Method m, double gamma, int n_x_axis)
{
    ConvergenceRecord r;
    r.method = to_string(m);
    r.pde = c.cfg.pde;
    r.tau = c.spec.tau();
    r.eps = c.spec.eps();
    r.gamma = gamma;
    r.n_x_axis = n_x_axis;
    r.n_x = c.x.size();
    r.h_x = c.h_x;
    r.seed = c.cfg.seed;
    r.rel_l2 = std::numeric_limits<double>::quiet_NaN();
    return r;
}

// Solves one weighted system; fills the record and returns the coefficients.
Vector solve_weighted(const SolveContext& c, const CollocationSystem& sys, const Layout& l, Method m,
                      ConvergenceRecord& r)
{
    const Vector w = build_weights(weight_scheme(m, weight_seed(c.cfg.seed, r.tau, r.gamma, r.n_x_axis)), l.y_pre,
                                   l.z_pre, l.t);
    const CollocationSystem ws = weight_and_scale(sys, w);
    const LstsqResult sol = solve_lstsq(ws.design, ws.rhs);
    r.kappa_w = weight_condition(w);
    r.truncated = sol.truncated;
    const Vector grad = ws.design.transpose() * (ws.rhs - ws.design * sol.coeffs);
    const double scale = (ws.design.transpose() * ws.rhs).norm();
    r.stationarity = scale > 0.0 ? grad.norm() / scale : grad.norm();
    if (c.cfg.log_cond && ws.design.cols() <= c.cfg.cond_max_columns) {
        const double k = cond2(ws.design);
        r.cond = k * k;
    }
    const Vector u_num = c.eval_matrix * sol.coeffs;
    r.rel_l2 = relative_l2(u_num, c.setup.u_ref);
    return sol.coeffs;
}

} // namespace

std::vector<ConvergenceRecord> run_convergence(const RunConfig& cfg)
{
    return run_convergence(cfg, make_setup(cfg));
}

std::vector<ConvergenceRecord> run_convergence(const RunConfig& cfg, const ProblemSetup& setup)
{
    require(!cfg.methods.empty() && !cfg.tau_list.empty() && !cfg.gamma_list.empty() && !cfg.nx_axis_list.empty(),
            "run_convergence: empty sweep");
    std::vector<ConvergenceRecord> out;
    std::map<int, double> fill_cache;
    for (int n_x_axis : cfg.nx_axis_list) {
        require(n_x_axis >= 2, "run_convergence: n_x per axis must be >= 2");
        fill_cache.emplace(n_x_axis, fill_distance(tensor_grid(n_x_axis, 2), cfg.fill_probe_n));
    }
    for (int tau : cfg.tau_list) {
        const MaternSpec spec(tau, 2, cfg.eps);
        for (int n_x_axis : cfg.nx_axis_list) {
            const PointSet x = tensor_grid(n_x_axis, 2);
            const double h_x = fill_cache.at(n_x_axis);
            const Matrix eval_matrix = kernel_matrix(spec, setup.eval_points, x);
            const SolveContext ctx{cfg, setup, spec, x, h_x, eval_matrix};
            for (double gamma : cfg.gamma_list) {
                const auto t0 = Clock::now();
                std::optional<Layout> layout;
                std::optional<CollocationSystem> sys;
                std::string shared_error;
                try {
                    layout = build_layout(cfg, cfg.pde, n_x_axis, gamma);
                    sys = assemble_system(setup.problem, spec, x, layout->y, layout->z, theta_default(h_x));
                } catch (const std::exception& e) {
                    shared_error = e.what();
                }
                const double assembly_ms = elapsed_ms(t0);
                for (Method m : cfg.methods) {
                    ConvergenceRecord r = base_record(ctx, m, gamma, n_x_axis);
                    const auto t1 = Clock::now();
                    if (!shared_error.empty()) {
                        r.error = shared_error;
                    } else {
                        r.n_y = sys->meta.n_y;
                        r.n_z = sys->meta.n_z;
                        try {
                            solve_weighted(ctx, *sys, *layout, m, r);
                        } catch (const std::exception& e) {
                            r.error = e.what();
                        }
                    }
                    r.wall_ms = cfg.record_timing ? assembly_ms + elapsed_ms(t1) : 0.0;
                    out.push_back(std::move(r));
                }
            }
        }
    }
    const auto method_rank = [&](const std::string& name) {
        const auto it = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                                     [&](Method m) { return to_string(m) == name; });
        return it - cfg.methods.begin();
    };
    std::stable_sort(out.begin(), out.end(), [&](const ConvergenceRecord& a, const ConvergenceRecord& b) {
        return std::make_tuple(method_rank(a.method), a.tau, a.gamma, a.n_x_axis) <
               std::make_tuple(method_rank(b.method), b.tau, b.gamma, b.n_x_axis);
    });
    return out;
}

SolveOutput solve_single(const RunConfig& cfg, const ProblemSetup& setup, Method method, int tau, double gamma,
                         int n_x_axis)
{
    const auto t0 = Clock::now();
    const MaternSpec spec(tau, 2, cfg.eps);
    const PointSet x = tensor_grid(n_x_axis, 2);
    const double h_x = fill_distance(x, cfg.fill_probe_n);
    const Matrix eval_matrix = kernel_matrix(spec, setup.eval_points, x);
    const SolveContext ctx{cfg, setup, spec, x, h_x, eval_matrix};
    const Layout layout = build_layout(cfg, cfg.pde, n_x_axis, gamma);
    const CollocationSystem sys =
        assemble_system(setup.problem, spec, x, layout.y, layout.z, theta_default(h_x));

    SolveOutput out;
    out.record = base_record(ctx, method, gamma, n_x_axis);
    out.record.n_y = sys.meta.n_y;
    out.record.n_z = sys.meta.n_z;
    out.coeffs = solve_weighted(ctx, sys, layout, method, out.record);
    out.u_num = eval_matrix * out.coeffs;
    out.record.wall_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
    return out;
}

} // namespace kcoll
