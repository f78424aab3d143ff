#include "kcoll/assembly.hpp"
#include "kcoll/experiments.hpp"
#include "kcoll/geometry.hpp"
#include "kcoll/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace kcoll;

namespace {

constexpr int kExitInvariant = 2;
constexpr double kStationarityTol = 1e-6;

struct ConvergeArgs {
    std::string pde;
    std::string method = "all";
    std::string tau = "4,5,6";
    std::string gamma = "1:0.5:4";
    std::string nx = "9,13,17,21,25";
    std::string transform;
    double eps = 5.0;
    std::uint64_t seed = 1;
    std::string out = "out";
    int eval_n = 86;
    bool cond = false;
    bool no_timing = false;
    int reference_n = 513;
    int cloud_points = 7338;
};

struct StabilityArgs {
    std::string check;
    std::string pde = "1";
    int tau = 4;
    std::string nx;  // equiv: 9, rayleigh: 7,9,13
    double eps = 5.0;
    int functions = 50;
    std::uint64_t seed = 1;
    std::string out = "out";
};

struct SolveArgs {
    std::string pde;
    std::string method = "wls-id";
    int tau = 4;
    int nx = 13;
    double gamma = 3.0;
    double eps = 5.0;
    std::uint64_t seed = 1;
    std::string transform;
    int eval_n = 86;
    int reference_n = 513;
    std::string dump;
};

struct ReferenceArgs {
    std::string pde = "4";
    int n = 257;
    std::string out = "reference.csv";
};

std::ofstream open_csv(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

RunConfig base_config(const std::string& pde, double eps, std::uint64_t seed, const std::string& transform,
                      int eval_n, int reference_n)
{
    RunConfig cfg;
    cfg.pde = pde;
    cfg.eps = eps;
    cfg.seed = seed;
    if (!transform.empty()) {
        cfg.transform = parse_transform(transform);
    }
    cfg.eval_grid_n = eval_n;
    cfg.reference_n = reference_n;
    return cfg;
}

int run_converge(const ConvergeArgs& a)
{
    RunConfig cfg = base_config(a.pde, a.eps, a.seed, a.transform, a.eval_n, a.reference_n);
    cfg.methods = parse_methods(a.method);
    cfg.tau_list = parse_int_list(a.tau);
    cfg.gamma_list = parse_real_list(a.gamma);
    cfg.nx_axis_list = parse_int_list(a.nx);
    cfg.log_cond = a.cond;
    cfg.record_timing = !a.no_timing;
    cfg.cloud.n_points = a.cloud_points;
    cfg.output_dir = a.out;

    const std::vector<ConvergenceRecord> records = run_convergence(cfg);
    emit_outputs(records, cfg.output_dir);

    int failures = 0;
    for (const auto& r : records) {
        if (!r.ok()) {
            std::cerr << "error: " << r.method << " tau=" << r.tau << " gamma=" << r.gamma << " nx=" << r.n_x_axis
                      << ": " << r.error << "\n";
            ++failures;
        } else if (r.stationarity > kStationarityTol) {
            std::cerr << "error: " << r.method << " tau=" << r.tau << " gamma=" << r.gamma << " nx=" << r.n_x_axis
                      << ": weighted residual not stationary (" << r.stationarity << ")\n";
            ++failures;
        }
    }
    for (const auto& row : fit_rates(records)) {
        std::cout << row.method << " pde=" << row.pde << " tau=" << row.tau << " gamma=" << row.gamma
                  << " slope=" << row.fit.slope << " (" << row.fit.points_used << " points)"
                  << (row.flagged ? " [flagged: more than half excluded]" : "") << "\n";
    }
    std::cout << records.size() << " records written to " << cfg.output_dir.string() << "\n";
    return failures == 0 ? 0 : kExitInvariant;
}

int run_lemma(const StabilityArgs& a, bool boundary)
{
    const std::vector<LemmaCase> cases = run_lemma_suite(boundary, a.functions, a.seed, {0.5, 1.0}, {0.1, 0.05});
    const std::filesystem::path path = std::filesystem::path(a.out) / (boundary ? "lemma2.csv" : "lemma1.csv");
    std::ofstream out = open_csv(path);
    out << "function,C,h,delta,fill_h_P,points,discrete_sum,delta_sum,oracle,holds,flagged,fill_in_bracket,"
           "on_boundary\n";
    int failed = 0;
    int flagged = 0;
    for (const auto& c : cases) {
        out << c.function << ',' << format_double(c.c) << ',' << format_double(c.h) << ','
            << format_double(c.selection.cell_edge_delta) << ',' << format_double(c.selection.fill_h_P) << ','
            << c.selection.points.size() << ',' << format_double(c.selection.discrete_sum) << ','
            << format_double(c.selection.delta_sum) << ',' << format_double(c.oracle) << ','
            << (c.check.holds ? "true" : "false") << ',' << (c.check.flagged ? "true" : "false") << ','
            << (c.fill_in_bracket ? "true" : "false") << ',' << (c.on_boundary ? "true" : "false") << '\n';
        flagged += c.check.flagged ? 1 : 0;
        const bool ok = (c.check.holds || c.check.flagged) && (boundary ? c.on_boundary : c.fill_in_bracket);
        failed += ok ? 0 : 1;
    }
    std::cout << cases.size() << " cases, " << failed << " failed, " << flagged << " flagged; wrote "
              << path.string() << "\n";
    return failed == 0 ? 0 : kExitInvariant;
}

int run_equiv(const StabilityArgs& a)
{
    const EllipticProblem prob = make_problem(a.pde);
    const MaternSpec spec(a.tau, 2, a.eps);
    const std::vector<int> nx = parse_int_list(a.nx);
    require(nx.size() == 1, "equiv: give a single --nx");
    const PointSet x = tensor_grid(nx[0], 2);
    const double h_x = fill_distance(x);
    const double theta = theta_default(h_x);

    const std::filesystem::path path = std::filesystem::path(a.out) / "equiv.csv";
    std::ofstream out = open_csv(path);
    out << "tau,NX,hX,NY_axis,fine_axis,c_low,c_high,spread\n";
    std::vector<double> spreads;
    for (int factor : {4, 8}) {
        const int ny = factor * (nx[0] - 1) + 1;
        const PointSet y = tensor_grid(ny, 2);
        const PointSet z = PointSet(boundary_subset(y).boundary.coords(), PointKind::boundary_only);
        const Vector w = build_weights(WeightScheme::trapezoid(), y, z, TransformKind::identity());
        const int fine = 4 * (ny - 1) + 1;
        const QuadratureRule quad = tensor_trapezoid_rule(fine, 2);
        const EquivalenceReport rep = norm_equiv_constants(spec, prob.op, x, y, z, w, theta, quad, h_x);
        out << a.tau << ',' << x.size() << ',' << format_double(h_x) << ',' << ny << ',' << fine << ','
            << format_double(rep.c_low) << ',' << format_double(rep.c_high) << ',' << format_double(rep.spread)
            << '\n';
        std::cout << "Y " << ny << "^2: c_low=" << rep.c_low << " c_high=" << rep.c_high << " spread=" << rep.spread
                  << "\n";
        spreads.push_back(rep.spread);
    }
    const double change = std::abs(spreads[1] - spreads[0]) / spreads[0];
    std::cout << "spread change under Y refinement: " << 100.0 * change << "%\n";
    const bool ok = spreads[0] <= 16.0 && spreads[1] <= 16.0 && change < 0.1;
    return ok ? 0 : kExitInvariant;
}

int run_rayleigh(const StabilityArgs& a)
{
    const EllipticProblem prob = make_problem(a.pde);
    const MaternSpec spec(a.tau, 2, a.eps);
    std::vector<int> nx = parse_int_list(a.nx);
    require(nx.size() >= 2, "rayleigh: give at least two --nx values");
    const std::filesystem::path path = std::filesystem::path(a.out) / "rayleigh.csv";
    std::ofstream out = open_csv(path);
    out << "tau,NX,hX,fine_axis,lambda_min\n";
    std::vector<double> hs;
    std::vector<double> lams;
    for (int n : nx) {
        const PointSet x = tensor_grid(n, 2);
        const double h_x = fill_distance(x);
        const int fine = 16 * (n - 1) + 1;
        const double lam = stability_rayleigh(spec, prob.op, x, theta_default(h_x), tensor_trapezoid_rule(fine, 2));
        out << a.tau << ',' << x.size() << ',' << format_double(h_x) << ',' << fine << ',' << format_double(lam)
            << '\n';
        std::cout << "nx=" << n << " h=" << h_x << " lambda_min=" << lam << "\n";
        hs.push_back(h_x);
        lams.push_back(lam);
    }
    const RateFit fit = fit_loglog(hs, lams);
    std::cout << "slope of log lambda_min vs log h: " << fit.slope << "\n";
    return fit.slope >= -1.0 ? 0 : kExitInvariant;
}

int run_solve(const SolveArgs& a)
{
    RunConfig cfg = base_config(a.pde, a.eps, a.seed, a.transform, a.eval_n, a.reference_n);
    const ProblemSetup setup = make_setup(cfg);
    const SolveOutput s = solve_single(cfg, setup, parse_method(a.method), a.tau, a.gamma, a.nx);
    const ConvergenceRecord& r = s.record;
    std::cout << r.method << " pde=" << r.pde << " tau=" << r.tau << " gamma=" << r.gamma << " NX=" << r.n_x
              << " NY=" << r.n_y << " NZ=" << r.n_z << " hX=" << r.h_x << " rel_l2=" << r.rel_l2
              << " truncated=" << (r.truncated ? "true" : "false") << " wall_ms=" << r.wall_ms << "\n";
    if (!a.dump.empty()) {
        std::ofstream out = open_csv(a.dump);
        out << "x,y,u,u_ref\n";
        for (Eigen::Index i = 0; i < setup.eval_points.size(); ++i) {
            out << format_double(setup.eval_points.coords()(0, i)) << ','
                << format_double(setup.eval_points.coords()(1, i)) << ',' << format_double(s.u_num[i]) << ','
                << format_double(setup.u_ref[i]) << '\n';
        }
    }
    if (r.stationarity > kStationarityTol) {
        std::cerr << "error: weighted residual not stationary (" << r.stationarity << ")\n";
        return kExitInvariant;
    }
    return 0;
}

int run_reference(const ReferenceArgs& a)
{
    require(parse_problem_id(a.pde) == ProblemId::pde4, "reference: only pde 4 needs a numerical reference");
    const GridFunction ref = fd_reference_pde4(a.n);
    std::ofstream out = open_csv(a.out);
    out << "x,y,u\n";
    const double dx = ref.spacing();
    for (int i = 0; i < a.n; ++i) {
        for (int j = 0; j < a.n; ++j) {
            out << format_double(-1.0 + i * dx) << ',' << format_double(-1.0 + j * dx) << ','
                << format_double(ref.values(i, j)) << '\n';
        }
    }
    std::cout << "n=" << a.n << " min=" << ref.values.minCoeff() << " max=" << ref.values.maxCoeff() << "; wrote "
              << a.out << "\n";
    return 0;
}

// Turns `key = value` lines of the --config file into flags placed before the
// command line ones, so that explicit flags win.
std::vector<std::string> expand_config(CLI::App& app, int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) {
        return args;
    }
    if (it + 1 == args.end()) {
        throw CLI::ArgumentMismatch("--config needs a file path");
    }
    const std::string file = *(it + 1);
    args.erase(it, it + 2);
    if (args.empty()) {
        throw CLI::CallForHelp();
    }
    CLI::App* sub = app.get_subcommand(args.front());
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config_file(file)) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw CLI::ExtrasError("unknown key '" + key + "' in " + file, CLI::ExitCodes::ExtrasError);
        }
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1") {
                injected.push_back("--" + key);
            }
            continue;
        }
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    args.insert(args.begin() + 1, injected.begin(), injected.end());
    return args;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kernel least-squares collocation for elliptic problems on the unit square", "kcoll"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_flag("-h,--help", "Print help; --config <file> reads flat `key = value` defaults");

    ConvergeArgs conv;
    CLI::App* c = app.add_subcommand("converge", "Convergence sweep over methods, tau, gamma and n_x");
    c->add_option("--pde", conv.pde, "Problem: 1, 2, 3, 3s (offset centre) or 4")->required();
    c->add_option("--method", conv.method, "vls-tp, wls-id, wls-rd, a comma list or all");
    c->add_option("--tau", conv.tau, "Kernel orders, comma list");
    c->add_option("--gamma", conv.gamma, "Oversampling ratios, list or start:step:stop");
    c->add_option("--nx", conv.nx, "Trial centres per axis, list");
    c->add_option("--eps", conv.eps, "Kernel shape parameter");
    c->add_option("--seed", conv.seed, "Seed for random weights and the scattered cloud");
    c->add_option("--out", conv.out, "Output directory");
    c->add_option("--transform", conv.transform, "identity, sine or signed-square (default per problem)");
    c->add_option("--eval-n", conv.eval_n, "Evaluation grid points per axis");
    c->add_flag("--cond", conv.cond, "Log the condition number of the normal matrix (slow)");
    c->add_flag("--no-timing", conv.no_timing, "Write wall_ms = 0 so reruns are byte-identical");
    c->add_option("--reference-n", conv.reference_n, "Finite-difference reference grid for pde 4");
    c->add_option("--cloud-points", conv.cloud_points, "Scattered points for pde 4");

    StabilityArgs stab;
    CLI::App* s = app.add_subcommand("stability", "Discrete-norm and stability checks");
    s->add_option("--check", stab.check, "lemma1, lemma2, equiv or rayleigh")
        ->required()
        ->check(CLI::IsMember({"lemma1", "lemma2", "equiv", "rayleigh"}));
    s->add_option("--pde", stab.pde, "Operator for equiv and rayleigh");
    s->add_option("--tau", stab.tau, "Kernel order");
    s->add_option("--nx", stab.nx, "Trial centres per axis (rayleigh: a list)");
    s->add_option("--eps", stab.eps, "Kernel shape parameter");
    s->add_option("--functions", stab.functions, "Random test functions for lemma checks");
    s->add_option("--seed", stab.seed, "Seed for the random test functions");
    s->add_option("--out", stab.out, "Output directory");

    SolveArgs sol;
    CLI::App* v = app.add_subcommand("solve", "Single solve, optionally dumping the solution on the evaluation grid");
    v->add_option("--pde", sol.pde, "Problem")->required();
    v->add_option("--method", sol.method, "vls-tp, wls-id or wls-rd");
    v->add_option("--tau", sol.tau, "Kernel order");
    v->add_option("--nx", sol.nx, "Trial centres per axis");
    v->add_option("--gamma", sol.gamma, "Oversampling ratio");
    v->add_option("--eps", sol.eps, "Kernel shape parameter");
    v->add_option("--seed", sol.seed, "Seed");
    v->add_option("--transform", sol.transform, "Collocation transform");
    v->add_option("--eval-n", sol.eval_n, "Evaluation grid points per axis");
    v->add_option("--reference-n", sol.reference_n, "Finite-difference reference grid for pde 4");
    v->add_option("--dump-solution", sol.dump, "CSV path for x,y,u,u_ref");

    ReferenceArgs ref;
    CLI::App* r = app.add_subcommand("reference", "Finite-difference reference solution for pde 4");
    r->add_option("--pde", ref.pde, "Problem (4)");
    r->add_option("--n", ref.n, "Grid points per axis");
    r->add_option("--out", ref.out, "CSV path");

    try {
        std::vector<std::string> args = expand_config(app, argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::Error& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c->parsed()) {
            return run_converge(conv);
        }
        if (s->parsed()) {
            if (stab.check == "lemma1" || stab.check == "lemma2") {
                return run_lemma(stab, stab.check == "lemma2");
            }
            if (stab.check == "equiv") {
                if (stab.nx.empty()) {
                    stab.nx = "9";
                }
                return run_equiv(stab);
            }
            if (stab.nx.empty()) {
                stab.nx = "7,9,13";
            }
            return run_rayleigh(stab);
        }
        if (v->parsed()) {
            return run_solve(sol);
        }
        return run_reference(ref);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
