#include "phibvp/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace phibvp {

namespace {

bool has_solution(const ProblemSpec& spec, double lambda, const ScanOptions& scan)
{
    return !scan_shooting(spec.with_lambda(lambda), scan).empty();
}

} // namespace

bool check_cone_membership(const GridFunction& u, const GridFunction& n, double slack)
{
    if (!u.same_grid(n))
        throw std::invalid_argument("cone membership: grids differ");
    return cone_bound_holds(u, support_data(n), slack);
}

BranchDiagram sweep(const ProblemSpec& spec, const std::vector<double>& lambda_grid, const ScanOptions& scan,
                    double rel_tol)
{
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        if (!(lambda_grid[k] > 0.0) || (k > 0 && !(lambda_grid[k] > lambda_grid[k - 1])))
            throw std::invalid_argument("lambda grid must be positive and ascending");
    }
    BranchDiagram diagram;
    for (double lambda : lambda_grid) {
        BranchPoint point;
        point.lambda = lambda;
        try {
            for (const auto& root : scan_shooting(spec.with_lambda(lambda), scan)) {
                const double norm = sup_norm(root.profile.u);
                const bool cone = check_cone_membership(root.profile.u, spec.n, 1e-8 * (1.0 + norm));
                point.solutions.push_back({norm, root.profile.du[0], cone});
            }
        } catch (const std::exception& e) {
            point.error = e.what();
            point.solutions.clear();
        }
        diagram.points.push_back(std::move(point));
    }

    // first drop from "some solution" to "none"
    for (std::size_t k = 0; k + 1 < diagram.points.size(); ++k) {
        const auto& here = diagram.points[k];
        const auto& next = diagram.points[k + 1];
        if (here.solutions.empty() || !here.error.empty() || !next.solutions.empty() || !next.error.empty())
            continue;
        double lo = here.lambda, hi = next.lambda;
        while (hi - lo > rel_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            if (has_solution(spec, mid, scan))
                lo = mid;
            else
                hi = mid;
        }
        diagram.lambda_star_estimate = 0.5 * (lo + hi);
        break;
    }
    return diagram;
}

Lambda1Certificate compute_lambda1(const ProblemSpec& spec, double R)
{
    if (!spec.G1 || !spec.G2)
        throw std::invalid_argument("lambda1 certificate requires (G1) and (G2)");
    if (!(R > 0.0))
        throw std::invalid_argument("lambda1 certificate requires R > 0");
    const auto [c1, t1, r1] = *spec.G1;
    const auto [c2, t2, r2] = *spec.G2;
    const Homeomorphism& phi = spec.phi;
    const double c_omega = 0.5 * spec.m.grid().length();

    Lambda1Certificate out;
    out.N = c1 * integral(spec.n);
    out.M = integral(spec.m);
    out.C = max_on(spec.f, R);
    if (!(out.M > 0.0) || !(out.C > 0.0))
        throw std::domain_error("lambda1 certificate requires m and f not identically zero");

    // t_under: first failure of phi(t / c_omega) > mu N t^{r1} on a log scan
    {
        const double mu = spec.mu, N = out.N;
        auto ok = [&](double t) { return phi.forward(t / c_omega) > mu * N * std::pow(t, r1); };
        const auto grid = log_grid(1e-12, 1e12, 400);
        std::size_t j = 0;
        while (j < grid.size() && ok(grid[j]))
            ++j;
        if (j == 0)
            throw std::domain_error("lambda1 certificate: (G1) comparison fails already at t = 1e-12");
        if (j == grid.size()) {
            out.t_under = grid.back();
        } else {
            double a = std::log(grid[j - 1]), b = std::log(grid[j]);
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                (ok(std::exp(mid)) ? a : b) = mid;
            }
            out.t_under = std::exp(a);
        }
    }
    out.rho = 0.5 * std::min({out.t_under, 0.5 * R, t1});
    out.lambda1 = (phi.forward(out.rho / c_omega) - spec.mu * out.N * std::pow(out.rho, r1)) / (out.M * out.C);
    if (!(out.lambda1 > 0.0))
        throw std::domain_error("lambda1 certificate unavailable with this R (try a larger R or a smaller mu)");

    // t_bar from the growth condition with weight c2 mu theta_n^{r2} n delta^{r2}
    {
        const SupportData sn = support_data(spec.n);
        const GridFunction delta = dist_to_boundary(spec.grid());
        const GridFunction h =
            (spec.n * delta.map([r2](double d) { return std::pow(d, r2); })).scaled(c2 * spec.mu * std::pow(sn.theta_under, r2));
        const auto M_grid = log_grid(1e-8, 1e8, 65);
        const double c = estimate_c_des3(phi, h, M_grid);
        out.c_g2 = c;
        auto ok = [&](double t) { return phi.inverse(c * std::pow(t, r2)) >= 2.0 * t / c; };
        const auto grid = log_grid(1e-8, 1e12, 400);
        std::size_t j = grid.size();
        while (j > 0 && ok(grid[j - 1]))
            --j;
        if (j == grid.size()) {
            out.t_bar = std::numeric_limits<double>::infinity();
        } else if (j == 0) {
            out.t_bar = grid.front();
        } else {
            double a = std::log(grid[j - 1]), b = std::log(grid[j]); // fails at a, holds at b
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                (ok(std::exp(mid)) ? b : a) = mid;
            }
            out.t_bar = std::exp(b);
        }
    }
    out.R_admissible = R > std::max(t2, out.t_bar);
    return out;
}

LambdaStarResult lambda_star_bisect(const ProblemSpec& spec, double lo, double hi, double rel_tol,
                                    const ScanOptions& scan)
{
    if (!(lo > 0.0) || !(hi > lo) || !(rel_tol > 0.0))
        throw std::invalid_argument("lambda_star_bisect requires 0 < lo < hi and rel_tol > 0");
    LambdaStarResult out;
    const bool at_lo = has_solution(spec, lo, scan);
    out.samples.emplace_back(lo, at_lo);
    if (!at_lo)
        throw std::invalid_argument("lambda_star_bisect: no positive solution found at the lower end");
    const bool at_hi = has_solution(spec, hi, scan);
    out.samples.emplace_back(hi, at_hi);
    if (at_hi)
        throw std::invalid_argument("lambda_star_bisect: a positive solution exists at the upper end");

    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const bool found = has_solution(spec, mid, scan);
        out.samples.emplace_back(mid, found);
        (found ? lo : hi) = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.estimate = 0.5 * (lo + hi);

    ScanOptions fine = scan;
    fine.count = 4 * scan.count;
    for (double frac : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
        const double lambda = frac * lo;
        bool found = has_solution(spec, lambda, scan);
        if (!found)
            found = has_solution(spec, lambda, fine);
        out.samples.emplace_back(lambda, found);
        if (!found) {
            out.no_gap = false;
            out.gap_at.push_back(lambda);
        }
    }
    std::sort(out.samples.begin(), out.samples.end());
    return out;
}

void write_diagram_csv(std::ostream& out, const BranchDiagram& diagram)
{
    out << "lambda,branch_index,sup_norm,initial_slope,in_cone\n";
    for (const auto& p : diagram.points) {
        for (std::size_t k = 0; k < p.solutions.size(); ++k) {
            const auto& s = p.solutions[k];
            out << format_double(p.lambda) << ',' << k << ',' << format_double(s.sup_norm) << ','
                << format_double(s.initial_slope) << ',' << (s.in_cone ? 1 : 0) << '\n';
        }
    }
}

} // namespace phibvp
