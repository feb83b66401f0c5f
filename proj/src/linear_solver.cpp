#include "phibvp/linear_solver.hpp"

#include "inverse_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phibvp {

namespace {

constexpr double kCMin = 1e-12;
constexpr double kCMax = 1e6;

void require_weight(const GridFunction& h)
{
    if (!h.is_nonnegative())
        throw std::invalid_argument("weight must be nonnegative");
}

// Quantities shared by every bracket evaluation for a fixed h.
struct BracketContext {
    const Homeomorphism& phi;
    const GridFunction& h;
    GridFunction H;
    SupportData support;
    double H_theta;
    detail::InverseIntegrator quad;

    BracketContext(const Homeomorphism& p, const GridFunction& weight)
        : phi(p), h(weight), H(cumulative_integral(weight)), support(support_data(weight)),
          H_theta(antiderivative_at(weight, H, support.theta_bar)), quad(p, weight, H)
    {
    }

    double left(double M) const
    {
        return quad.range(h.grid().a(), support.theta_bar, H_theta, M).value;
    }

    double right(double M) const
    {
        return -quad.range(support.theta_bar, h.grid().b(), H_theta, M).value;
    }

    double bracket(double M) const { return std::min(left(M), right(M)); }

    // largest c with c phi^{-1}(c M) <= bracket(M); 0 if even kCMin fails
    double c_for(double M) const
    {
        const double L = bracket(M);
        auto g = [&](double c) { return c * phi.inverse(c * M); };
        if (g(kCMin) > L)
            return 0.0;
        if (g(kCMax) <= L)
            return kCMax;
        double lo = std::log(kCMin), hi = std::log(kCMax);
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(std::exp(mid)) <= L)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(lo);
    }
};

} // namespace

SolutionProfile solve_linear(const Homeomorphism& phi, const GridFunction& h, const LinearOptions& opts)
{
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("solve_linear: tol must be positive");
    const GridPtr& grid = h.grid_ptr();
    const GridFunction H = cumulative_integral(h);
    const detail::InverseIntegrator quad(phi, h, H);

    auto F = [&](double c) {
        detail::Sums s;
        for (std::size_t i = 0; i < grid->cells(); ++i)
            s += quad.cell(i, c);
        return s;
    };

    const auto [mn, mx] = std::minmax_element(H.values().begin(), H.values().end());
    double lo = *mn, hi = *mx;
    double c = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        c = 0.5 * (lo + hi);
        const detail::Sums s = F(c);
        if (std::abs(s.value) <= opts.tol * s.magnitude || s.magnitude == 0.0) {
            converged = true;
            break;
        }
        if (s.value > 0.0)
            hi = c;
        else
            lo = c;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            c = mid;
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("solve_linear: bisection did not converge within the iteration cap "
                                 "(tolerance too tight)");

    std::vector<double> u(grid->size(), 0.0), du(grid->size());
    for (std::size_t i = 0; i < grid->cells(); ++i)
        u[i + 1] = u[i] + quad.cell(i, c).value;
    double residual = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        du[i] = phi.inverse(c - H[i]);
        residual = std::max(residual, std::abs(phi.forward(du[i]) + H[i] - c));
    }
    if (!std::isfinite(u.back()) || !std::isfinite(*std::max_element(u.begin(), u.end())))
        throw std::overflow_error("solve_linear: solution exceeds the double range");
    const double defect = std::abs(u.back());
    return SolutionProfile{GridFunction(grid, std::move(u)), GridFunction(grid, std::move(du)), c, residual,
                           defect};
}

bool monotone_check(const Homeomorphism& phi, const GridFunction& h1, const GridFunction& h2, double slack)
{
    if (!pointwise_leq(h1, h2, 0.0))
        throw std::invalid_argument("monotone_check requires h1 <= h2");
    const auto s1 = solve_linear(phi, h1);
    const auto s2 = solve_linear(phi, h2);
    return pointwise_leq(s1.u, s2.u, slack);
}

SandwichBounds lemma21_bounds(const Homeomorphism& phi, const GridFunction& h)
{
    require_weight(h);
    const BracketContext ctx(phi, h);
    const double left = ctx.left(1.0);
    const double right = ctx.right(1.0);
    const double bracket = std::min(left, right);
    const GridFunction delta = dist_to_boundary(h.grid_ptr());
    const double top = phi.inverse(integral(h));
    return SandwichBounds{delta.scaled(ctx.support.theta_under * bracket), delta.scaled(top), left, right,
                          bracket, ctx.support};
}

bool cone_bound_holds(const GridFunction& u, const SupportData& support, double slack)
{
    const GridFunction delta = dist_to_boundary(u.grid_ptr());
    const double k = support.theta_under * sup_norm(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < k * delta[i] - slack)
            return false;
    }
    return true;
}

bool lemma21_cone_bound(const Homeomorphism& phi, const GridFunction& h, double slack)
{
    require_weight(h);
    const SupportData s = support_data(h);
    return cone_bound_holds(solve_linear(phi, h).u, s, slack);
}

double des3_bracket(const Homeomorphism& phi, const GridFunction& h, double M)
{
    require_weight(h);
    return BracketContext(phi, h).bracket(M);
}

double estimate_c_des3(const Homeomorphism& phi, const GridFunction& h, std::span<const double> M_grid)
{
    require_weight(h);
    if (M_grid.empty())
        throw std::invalid_argument("estimate_c_des3: empty M grid");
    for (double M : M_grid) {
        if (!(M > 0.0))
            throw std::invalid_argument("estimate_c_des3: M values must be positive");
    }
    const BracketContext ctx(phi, h);
    std::vector<double> cs(M_grid.size());
    for (std::size_t k = 0; k < M_grid.size(); ++k)
        cs[k] = ctx.c_for(M_grid[k]);

    double best = *std::min_element(cs.begin(), cs.end());
    if (!(best > 0.0))
        throw std::domain_error("estimate_c_des3: no c in (1e-12, 1e6] satisfies the inequality");

    // the per-M bound may dip between grid points; golden-section on ln M around local minima
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const bool left_ok = k == 0 || cs[k] <= cs[k - 1];
        const bool right_ok = k + 1 == cs.size() || cs[k] <= cs[k + 1];
        if (!left_ok || !right_ok || cs[k] >= kCMax)
            continue;
        double lo = std::log(M_grid[k == 0 ? 0 : k - 1]);
        double hi = std::log(M_grid[k + 1 == cs.size() ? k : k + 1]);
        if (!(hi > lo))
            continue;
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = ctx.c_for(std::exp(x1)), f2 = ctx.c_for(std::exp(x2));
        for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = ctx.c_for(std::exp(x1));
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = ctx.c_for(std::exp(x2));
            }
        }
        best = std::min({best, f1, f2});
    }
    if (!(best > 0.0))
        throw std::domain_error("estimate_c_des3: no c in (1e-12, 1e6] satisfies the inequality");
    return best * (1.0 - 1e-9);
}

bool check_c_des3(const Homeomorphism& phi, const GridFunction& h, double c, std::span<const double> M_grid)
{
    require_weight(h);
    const BracketContext ctx(phi, h);
    for (double M : M_grid) {
        if (ctx.bracket(M) < c * phi.inverse(c * M))
            return false;
    }
    return true;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (!(lo > 0.0) || !(hi >= lo) || count == 0)
        throw std::invalid_argument("log_grid needs 0 < lo <= hi and count >= 1");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (std::size_t k = 0; k < count; ++k)
        out[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace phibvp
