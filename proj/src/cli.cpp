#include "phibvp/cli.hpp"

#include "phibvp/bounds_suite.hpp"
#include "phibvp/multiplicity.hpp"
#include "phibvp/orlicz.hpp"
#include "phibvp/problem_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace phibvp {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// thrown for failures that should map to the domain exit code
struct DomainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// non-finite values become null; a companion flag carries the meaning where it matters
json num(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

fs::path prepare_dir(const std::string& dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw DomainFailure("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DomainFailure("cannot write '" + path.string() + "'");
    return out;
}

void write_json(const fs::path& path, const json& doc)
{
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

json bounds_json(const BoundsCaseResult& r)
{
    json j;
    j["phi"] = r.phi;
    j["sup_norm"] = num(r.sup_norm);
    j["sandwich_ok"] = r.sandwich_ok;
    j["sandwich_excess"] = num(r.sandwich_excess);
    j["cone_ok"] = r.cone_ok;
    j["cone_excess"] = num(r.cone_excess);
    j["min_bracket_ok"] = r.des2_ok;
    j["min_bracket_excess"] = num(r.des2_excess);
    j["c_estimate"] = num(r.c_des3);
    j["c_estimate_ok"] = r.des3_ok;
    if (!r.error.empty())
        j["error"] = r.error;
    return j;
}

json index_json(const IndexEstimate& e)
{
    json j;
    j["alpha_hat"] = num(e.alpha_hat);
    j["beta_hat"] = num(e.beta_hat);
    j["beta_infinite"] = e.beta_infinite();
    j["fit_residual"] = num(e.fit_residual);
    return j;
}

// options shared by the problem-driven subcommands
struct ProblemArgs {
    std::string path;
    std::string out_dir = ".";
    std::optional<std::size_t> grid_size;
    std::optional<double> tol;
};

void add_problem_args(CLI::App* sub, ProblemArgs& a)
{
    sub->add_option("problem", a.path, "Problem file (JSON)")->required();
    sub->add_option("--out-dir", a.out_dir, "Directory for output files")->capture_default_str();
    sub->add_option("--grid-size", a.grid_size, "Override the grid size of the problem file")
        ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 24));
    sub->add_option("--tol", a.tol, "Solver tolerance")->check(CLI::PositiveNumber);
}

int cmd_solve_linear(const ProblemArgs& a)
{
    const ProblemFile pf = parse_problem(a.path, a.grid_size);
    const GridFunction h = pf.h ? *pf.h : pf.spec.m;
    LinearOptions opts;
    if (a.tol)
        opts.tol = *a.tol;
    const SolutionProfile s = solve_linear(pf.spec.phi, h, opts);
    const BoundsCaseResult checks = check_linear_bounds(pf.spec.phi, h, s);

    const fs::path dir = prepare_dir(a.out_dir);
    {
        auto out = open_out(dir / "solution.csv");
        const std::vector<GridFunction> cols{s.u, s.du};
        const std::vector<std::string> names{"u", "du"};
        write_csv(out, cols, names);
    }
    json r;
    r["phi"] = pf.spec.phi.label();
    r["grid_size"] = h.size();
    r["c_star"] = num(s.c_star);
    r["residual"] = num(s.residual);
    r["boundary_defect"] = num(s.boundary_defect);
    r["sup_norm"] = num(sup_norm(s.u));
    r["bounds"] = bounds_json(checks);
    write_json(dir / "report.json", r);
    return kExitOk;
}

struct ScanArgs {
    double s_max = 100.0;
    int count = 200;
};

void add_scan_args(CLI::App* sub, ScanArgs& s)
{
    sub->add_option("--s-max", s.s_max, "Largest initial slope in the shooting scan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--count", s.count, "Points of the log-spaced shooting scan")
        ->check(CLI::Range(8, 1000000))
        ->capture_default_str();
}

ScanOptions scan_options(const ScanArgs& s)
{
    ScanOptions o;
    o.s_max = s.s_max;
    o.count = s.count;
    return o;
}

int cmd_solve_nonlinear(const ProblemArgs& a, const ScanArgs& scan_args)
{
    const ProblemFile pf = parse_problem(a.path, a.grid_size);
    const ProblemSpec& spec = pf.spec;
    if (!spec.F || !spec.G1)
        throw DomainFailure("solve-nonlinear needs the F and G1 blocks in the problem file");
    constexpr double kSlack = 1e-6;

    const Supersolution super = build_supersolution(spec);
    const auto M = log_grid(1e-8, 1e4, 49);
    const double c = estimate_c_des3(spec.phi, subsolution_weight(spec), M);
    const Subsolution sub = order_below(spec, build_subsolution(spec, c), super);
    BetweenOptions bopts;
    if (a.tol)
        bopts.tol = *a.tol;
    const BetweenResult mid = solve_between(spec, sub.v.u, super.w.u, bopts);
    const VerifyResult w_check = verify_supersolution(spec, super.w, kSlack);
    const VerifyResult v_check = verify_subsolution(spec, sub.v, kSlack);
    const auto roots = scan_shooting(spec, scan_options(scan_args));

    const fs::path dir = prepare_dir(a.out_dir);
    {
        auto out = open_out(dir / "profiles.csv");
        const std::vector<GridFunction> cols{sub.v.u, mid.profile.u, super.w.u};
        const std::vector<std::string> names{"v", "u", "w"};
        write_csv(out, cols, names);
    }
    if (!roots.empty()) {
        auto out = open_out(dir / "shooting.csv");
        std::vector<GridFunction> cols;
        std::vector<std::string> names;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            cols.push_back(roots[k].profile.u);
            names.push_back("u" + std::to_string(k + 1));
        }
        write_csv(out, cols, names);
    }

    json r;
    r["lambda"] = spec.lambda;
    r["mu"] = spec.mu;
    r["lambda0"] = num(super.lambda0);
    r["kappa"] = num(super.kappa);
    r["epsilon"] = num(sub.epsilon);
    r["c_estimate"] = num(c);
    r["supersolution"] = {{"sup_norm", num(sup_norm(super.w.u))},
                          {"verified", w_check.ok},
                          {"max_violation", num(w_check.max_violation)},
                          {"in_cone", in_positive_cone(super.w)}};
    r["subsolution"] = {{"sup_norm", num(sup_norm(sub.v.u))},
                        {"verified", v_check.ok},
                        {"max_violation", num(v_check.max_violation)},
                        {"in_cone", in_positive_cone(sub.v)}};
    r["between"] = {{"converged", mid.converged},
                    {"iterations", mid.iterations},
                    {"monotone_mode", mid.monotone_mode},
                    {"cauchy_gap", num(mid.cauchy_gap)},
                    {"residual", num(mid.residual)},
                    {"sup_norm", num(sup_norm(mid.profile.u))},
                    {"ordered", pointwise_leq(sub.v.u, mid.profile.u, kSlack) &&
                                    pointwise_leq(mid.profile.u, super.w.u, kSlack)},
                    {"in_cone", in_positive_cone(mid.profile)}};
    json shots = json::array();
    for (const auto& root : roots) {
        shots.push_back({{"initial_slope", num(root.s)},
                         {"sup_norm", num(sup_norm(root.profile.u))},
                         {"terminal", num(root.terminal)},
                         {"residual", num(root.residual)},
                         {"in_cone", in_positive_cone(root.profile)}});
    }
    r["shooting"] = shots;
    write_json(dir / "report.json", r);
    return kExitOk;
}

struct SweepArgs {
    double lambda_min = 1e-4;
    double lambda_max = 100.0;
    int lambda_steps = 25;
    double radius = 4.0;
};

int cmd_sweep(const ProblemArgs& a, const ScanArgs& scan_args, const SweepArgs& s)
{
    if (!(s.lambda_min < s.lambda_max))
        throw CLI::ValidationError("--lambda-min", "must be below --lambda-max");
    const ProblemFile pf = parse_problem(a.path, a.grid_size);
    const ProblemSpec& spec = pf.spec;
    const auto grid = log_grid(s.lambda_min, s.lambda_max, static_cast<std::size_t>(s.lambda_steps));
    const BranchDiagram d = sweep(spec, grid, scan_options(scan_args), a.tol.value_or(1e-3));

    json r;
    r["lambda_star_estimate"] = d.lambda_star_estimate ? num(*d.lambda_star_estimate) : json(nullptr);
    r["lambda0"] = nullptr;
    if (spec.G1) {
        try {
            r["lambda0"] = num(supersolution_constants(spec).lambda0);
        } catch (const std::exception& e) {
            r["lambda0_error"] = e.what();
        }
    }
    r["lambda1"] = nullptr;
    r["rho"] = nullptr;
    r["radius"] = s.radius;
    if (spec.G1 && spec.G2) {
        try {
            const Lambda1Certificate cert = compute_lambda1(spec, s.radius);
            r["lambda1"] = num(cert.lambda1);
            r["rho"] = num(cert.rho);
            r["radius_admissible"] = cert.R_admissible;
        } catch (const std::exception& e) {
            r["lambda1_error"] = e.what();
        }
    }
    json pts = json::array();
    for (const auto& p : d.points) {
        json j{{"lambda", p.lambda}, {"solutions", p.solutions.size()}};
        if (!p.error.empty())
            j["error"] = p.error;
        pts.push_back(j);
    }
    r["points"] = pts;

    const fs::path dir = prepare_dir(a.out_dir);
    {
        auto out = open_out(dir / "diagram.csv");
        write_diagram_csv(out, d);
    }
    write_json(dir / "report.json", r);
    return kExitOk;
}

struct IndicesArgs {
    std::string phi;
    bool all = false;
    std::optional<double> q, r1, r2;
    std::string out_dir = ".";
};

int cmd_indices(const IndicesArgs& a)
{
    std::vector<std::string> names;
    if (a.all)
        names = catalog_descriptors();
    else
        names.push_back(a.phi);
    const bool advise = a.q && a.r1 && a.r2;

    json entries = json::array();
    for (const auto& name : names) {
        const Homeomorphism phi = parse_phi(name);
        const IndexEstimate est = estimate_indices(phi);
        const Delta2Result d2 = check_delta2(phi);
        const PhiConditionResult pc = check_phi_conditions(phi, est);
        const DualityResult du = duality_check(phi);
        json j;
        j["phi"] = name;
        j.update(index_json(est));
        j["delta2"] = {{"holds", d2.holds}, {"k_hat", num(d2.k_hat)}, {"k_hat_extended", num(d2.k_hat_extended)}};
        j["phi_cond"] = pc.phi_cond;
        j["phi_prime_cond"] = pc.phi_prime_cond;
        j["phi_cond_constant"] = num(pc.C);
        j["duality"] = {{"ok", du.ok},
                        {"inverse", index_json(du.inverse)},
                        {"beta_residual", num(du.beta_residual)},
                        {"alpha_residual", num(du.alpha_residual)}};
        if (advise) {
            const AdvisorReport adv = hypothesis_advisor(phi, *a.q, *a.r1, *a.r2);
            json items = json::array();
            for (const auto& h : adv.items) {
                items.push_back({{"hypothesis", h.name},
                                 {"exponent", h.exponent},
                                 {"end", to_string(h.end)},
                                 {"index_verdict", to_string(h.index_verdict)},
                                 {"limit", to_string(h.limit)},
                                 {"verdict", to_string(h.verdict)}});
            }
            j["advisor"] = items;
        }
        entries.push_back(j);
    }
    const fs::path dir = prepare_dir(a.out_dir);
    write_json(dir / "indices.json", json{{"entries", entries}});
    return kExitOk;
}

struct BoundsArgs {
    std::uint64_t seed = 7;
    std::size_t cases = 200;
    std::size_t grid_size = 257;
    std::string out_dir = ".";
};

int cmd_verify_bounds(const BoundsArgs& a)
{
    const auto cases = generate_bounds_cases(a.seed, a.cases, a.grid_size);
    const auto results = run_bounds_suite(cases);
    std::size_t passed = 0;
    json rows = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        json j = bounds_json(results[i]);
        j["case"] = i;
        j["ok"] = results[i].ok();
        rows.push_back(j);
        passed += results[i].ok() ? 1 : 0;
    }
    json r;
    r["seed"] = a.seed;
    r["cases"] = a.cases;
    r["grid_size"] = a.grid_size;
    r["passed"] = passed;
    r["failed"] = results.size() - passed;
    r["results"] = rows;
    const fs::path dir = prepare_dir(a.out_dir);
    write_json(dir / "bounds_report.json", r);
    if (passed != results.size())
        throw DomainFailure(std::to_string(results.size() - passed) + " of " + std::to_string(results.size()) +
                            " bound cases failed; see bounds_report.json");
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Solver and diagnostics for one-dimensional phi-Laplacian boundary value problems", "phi-bvp"};
    app.require_subcommand(1);

    ProblemArgs lin_args, nl_args, sw_args;
    ScanArgs nl_scan, sw_scan;
    SweepArgs sweep_args;
    IndicesArgs idx_args;
    BoundsArgs bnd_args;

    auto* lin = app.add_subcommand("solve-linear", "Solve -phi(u')' = h with zero boundary values");
    add_problem_args(lin, lin_args);

    auto* nl = app.add_subcommand("solve-nonlinear", "Sub/supersolution pair, iteration between them, shooting scan");
    add_problem_args(nl, nl_args);
    add_scan_args(nl, nl_scan);

    auto* sw = app.add_subcommand("sweep", "Positive solutions over a log-spaced lambda grid");
    add_problem_args(sw, sw_args);
    add_scan_args(sw, sw_scan);
    sw->add_option("--lambda-min", sweep_args.lambda_min)->check(CLI::PositiveNumber)->capture_default_str();
    sw->add_option("--lambda-max", sweep_args.lambda_max)->check(CLI::PositiveNumber)->capture_default_str();
    sw->add_option("--lambda-steps", sweep_args.lambda_steps)->check(CLI::Range(2, 100000))->capture_default_str();
    sw->add_option("--radius", sweep_args.radius, "Ball radius R for the lambda1 certificate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* idx = app.add_subcommand("indices", "Index estimates, Delta2, (Phi) and duality for catalog entries");
    auto* phi_opt = idx->add_option("--phi", idx_args.phi, "Catalog descriptor, e.g. power:2");
    auto* all_opt = idx->add_flag("--all", idx_args.all, "Every catalog entry");
    phi_opt->excludes(all_opt);
    idx->add_option("--q", idx_args.q, "Exponent of (F) for the hypothesis advisor")->check(CLI::PositiveNumber);
    idx->add_option("--r1", idx_args.r1, "Exponent of (G1)")->check(CLI::PositiveNumber);
    idx->add_option("--r2", idx_args.r2, "Exponent of (G2)")->check(CLI::PositiveNumber);
    idx->add_option("--out-dir", idx_args.out_dir)->capture_default_str();

    auto* bnd = app.add_subcommand("verify-bounds", "Randomized check of the linear a-priori bounds");
    bnd->add_option("--seed", bnd_args.seed)->capture_default_str();
    bnd->add_option("--cases", bnd_args.cases)->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
        ->capture_default_str();
    bnd->add_option("--grid-size", bnd_args.grid_size)->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20))
        ->capture_default_str();
    bnd->add_option("--out-dir", bnd_args.out_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
        if (idx->parsed() && !idx_args.all && idx_args.phi.empty())
            throw CLI::ValidationError("indices", "needs --phi or --all");
        if (idx->parsed() && (idx_args.q || idx_args.r1 || idx_args.r2) && !(idx_args.q && idx_args.r1 && idx_args.r2))
            throw CLI::ValidationError("indices", "--q, --r1 and --r2 go together");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "phi-bvp: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (lin->parsed())
            return cmd_solve_linear(lin_args);
        if (nl->parsed())
            return cmd_solve_nonlinear(nl_args, nl_scan);
        if (sw->parsed())
            return cmd_sweep(sw_args, sw_scan, sweep_args);
        if (idx->parsed())
            return cmd_indices(idx_args);
        return cmd_verify_bounds(bnd_args);
    } catch (const CLI::ParseError& e) {
        err << "phi-bvp: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "phi-bvp: " << e.what() << "\n";
        return kExitDomain;
    }
}

} // namespace phibvp
