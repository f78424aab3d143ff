#ifndef KCOLL_EXPERIMENTS_HPP
#define KCOLL_EXPERIMENTS_HPP

#include "kcoll/assembly.hpp"
#include "kcoll/geometry.hpp"
#include "kcoll/matern.hpp"
#include "kcoll/pde.hpp"
#include "kcoll/stability.hpp"
#include "kcoll/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kcoll {

enum class Method { vls_tp, wls_id, wls_rd };

std::string to_string(Method m);
Method parse_method(const std::string& name);
/// "all" expands to the three methods.
std::vector<Method> parse_methods(const std::string& name);

/// Weighting scheme of a method; wls-rd draws from `seed`.
WeightScheme weight_scheme(Method m, std::uint64_t seed);

/// Default collocation transform per problem: sine for pde1, signed-square
/// for pde2/pde3, identity for pde4.
TransformKind default_transform(const std::string& pde);

struct CloudConfig {
    int n_points = 7338;
    Eigen::Vector2d normal = Eigen::Vector2d(1.0, -1.0).normalized();
    double width = 0.2;
};

struct RunConfig {
    std::string pde = "1";
    std::vector<Method> methods{Method::wls_id};
    std::vector<int> tau_list{4, 5, 6};
    double eps = 5.0;
    std::vector<double> gamma_list{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    std::vector<int> nx_axis_list{9, 13, 17, 21, 25};
    std::optional<TransformKind> transform;  // unset: default_transform(pde)
    int eval_grid_n = 86;
    std::uint64_t seed = 1;
    int fill_probe_n = kDefaultProbeN;
    bool log_cond = false;       // cond of the normal matrix via SVD; slow
    int cond_max_columns = 1200; // skip cond above this size
    CloudConfig cloud;           // pde4 only
    int reference_n = 513;       // pde4 only
    bool record_timing = true;   // false: wall_ms = 0, records are byte-reproducible
    std::filesystem::path output_dir = "out";
};

struct ConvergenceRecord {
    std::string method;
    std::string pde;
    int tau = 0;
    double eps = 0.0;
    double gamma = 0.0;
    int n_x_axis = 0;
    Eigen::Index n_x = 0;
    Eigen::Index n_y = 0;
    Eigen::Index n_z = 0;
    double h_x = 0.0;
    double rel_l2 = 0.0;
    std::optional<double> cond;  // kappa(A^T W A)
    std::optional<double> kappa_w;
    bool truncated = false;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    double stationarity = 0.0;  // |A^T W r| / |A^T W b|
    std::string error;          // non-empty when the run failed

    bool ok() const { return error.empty(); }
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
    int points_excluded = 0;
};

inline constexpr double kRoundoffFloor = 1e-11;

/// Everything needed to solve one configuration, built once and reused.
struct ProblemSetup {
    EllipticProblem problem;
    PointSet eval_points;
    Vector u_ref;  // reference values on eval_points
};

/// Builds the problem, the evaluation grid and the reference values (exact
/// solution, or the finite-difference reference for pde4).
ProblemSetup make_setup(const RunConfig& cfg);

/// One sweep over methods x tau x gamma x n_x. Failures are recorded in the
/// record and the sweep continues. Records come back sorted by
/// (method, tau, gamma, n_x).
std::vector<ConvergenceRecord> run_convergence(const RunConfig& cfg);
std::vector<ConvergenceRecord> run_convergence(const RunConfig& cfg, const ProblemSetup& setup);

/// Trial coefficients and the solution on the evaluation grid for one configuration.
struct SolveOutput {
    ConvergenceRecord record;
    Vector coeffs;
    Vector u_num;
};
SolveOutput solve_single(const RunConfig& cfg, const ProblemSetup& setup, Method method, int tau, double gamma,
                         int n_x_axis);

double relative_l2(const Vector& u_num, const Vector& u_ref);

/// Least-squares slope of log(err) against log(h); truncated records and
/// errors below kRoundoffFloor are excluded.
RateFit fit_rate(const std::vector<ConvergenceRecord>& records);
RateFit fit_loglog(const std::vector<double>& h, const std::vector<double>& err);

/// Nodal values on an n x n grid over [-1,1]^2 with bilinear interpolation.
struct GridFunction {
    int n = 0;
    Matrix values;  // values(i, j) at (x_i, y_j)

    double spacing() const { return 2.0 / (n - 1); }
    double operator()(const Point& p) const;
};

/// div(k grad u) = f on (-1,1)^2, u = g on the boundary: 5-point scheme,
/// arithmetic-mean face coefficients, sparse direct solve.
GridFunction fd_solve_divergence(int n, const std::function<double(const Point&)>& k,
                                 const std::function<double(const Point&)>& f,
                                 const std::function<double(const Point&)>& g);

GridFunction fd_reference_pde4(int n);

/// Seeded random smooth field: a short sum of Matern bumps with random
/// order, shape, weights and centres.
std::function<double(const Point&)> random_matern_field(std::uint64_t seed, int dim = 2);

/// Composite Simpson approximation of the squared L2 norm of v over the box
/// (n odd nodes per axis) or over its boundary faces.
double simpson_box_sq_norm(const std::function<double(const Point&)>& v, int n, int dim = 2);
double simpson_boundary_sq_norm(const std::function<double(const Point&)>& v, int n, int dim = 2);

struct LemmaCase {
    int function = 0;
    double c = 0.0;
    double h = 0.0;
    RiemannSelection selection;
    double oracle = 0.0;
    BoundCheck check;
    bool fill_in_bracket = false;  // Ch/2 <= fill_h_P <= Ch
    bool on_boundary = true;       // boundary suites: every pick lies on a face
};

/// Riemann-selection bound over random fields and every (C, h) pair, with a
/// Simpson oracle of `oracle_n` nodes per axis.
std::vector<LemmaCase> run_lemma_suite(bool boundary, int n_functions, std::uint64_t seed,
                                       const std::vector<double>& c_values, const std::vector<double>& h_values,
                                       int oracle_n = 1001);

// output

void write_records_csv(const std::filesystem::path& path, const std::vector<ConvergenceRecord>& records);

struct RateRow {
    std::string method;
    std::string pde;
    int tau = 0;
    double gamma = 0.0;
    RateFit fit;
    bool flagged = false;  // exclusions removed more than half the records
};

/// One fit per (method, pde, tau, gamma) group with at least two usable records.
std::vector<RateRow> fit_rates(const std::vector<ConvergenceRecord>& records);
void write_rates_csv(const std::filesystem::path& path, const std::vector<RateRow>& rates);

/// Log-log plot of rel_l2 against h_X, one curve per (method, gamma), with a
/// reference line of slope tau.
std::string loglog_svg(const std::vector<ConvergenceRecord>& records, const std::string& title, int tau);

/// records.csv, rates.csv and one SVG per (pde, tau).
void emit_outputs(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& dir);

/// Flat `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

std::vector<int> parse_int_list(const std::string& text);
/// Comma list or start:step:stop range.
std::vector<double> parse_real_list(const std::string& text);

std::string format_double(double v);

} // namespace kcoll

#endif // KCOLL_EXPERIMENTS_HPP
