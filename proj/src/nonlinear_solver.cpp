#include "phibvp/nonlinear_solver.hpp"

#include "phibvp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace phibvp {

namespace {

constexpr double kBlowUp = 1e12;

double positive_part(double u)
{
    return u > 0.0 ? u : 0.0;
}

std::vector<std::size_t> corner_nodes(const Grid& g, std::span<const double> corners)
{
    std::vector<std::size_t> out;
    for (double t : corners) {
        if (!(t > g.a() && t < g.b()))
            throw std::invalid_argument("corner points must be interior");
        std::size_t k = g.cell_of(t);
        if (std::abs(g[k + 1] - t) < std::abs(g[k] - t))
            ++k;
        if (std::abs(g[k] - t) > 1e-12 * std::max(1.0, g.length()) || k == 0 || k + 1 >= g.size())
            throw std::invalid_argument("corner points must be interior grid nodes");
        out.push_back(k);
    }
    return out;
}

// cell averages of rhs(u+) under the chosen rule
std::vector<double> cell_rhs(const ProblemSpec& spec, const SolutionProfile& p, CellAverage avg)
{
    const Grid& g = p.u.grid();
    const GridFunction r = rhs(spec, p.u.map(positive_part));
    std::vector<double> out(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) {
        if (avg == CellAverage::Trapezoid) {
            out[i] = 0.5 * (r[i] + r[i + 1]);
        } else {
            const double w = g.width(i);
            const double um = 0.5 * (p.u[i] + p.u[i + 1]) + w * (p.du[i] - p.du[i + 1]) / 8.0;
            const double rm = rhs_at(spec, g[i] + 0.5 * w, positive_part(um));
            out[i] = (r[i] + 4.0 * rm + r[i + 1]) / 6.0;
        }
    }
    return out;
}

// sign = +1 checks a supersolution, -1 a subsolution
VerifyResult verify_common(const ProblemSpec& spec, const SolutionProfile& p, double slack,
                           std::span<const double> corners, CellAverage avg, int sign)
{
    const Grid& g = p.u.grid();
    if (!p.u.same_grid(spec.m))
        throw std::invalid_argument("profile and problem live on different grids");
    const auto knots = corner_nodes(g, corners);
    auto is_corner = [&](std::size_t k) { return std::find(knots.begin(), knots.end(), k) != knots.end(); };

    const std::vector<double> avg_rhs = cell_rhs(spec, p, avg);
    const std::size_t last = g.size() - 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        double dl = p.du[i], dr = p.du[i + 1];
        if (is_corner(i) && i + 2 <= last)
            dl = 2.0 * p.du[i + 1] - p.du[i + 2];
        if (is_corner(i + 1) && i >= 1)
            dr = 2.0 * p.du[i] - p.du[i - 1];
        const double lhs = -(spec.phi.forward(dr) - spec.phi.forward(dl)) / g.width(i);
        worst = std::max(worst, sign * (avg_rhs[i] - lhs));
    }
    // boundary sign
    worst = std::max(worst, -sign * p.u[0]);
    worst = std::max(worst, -sign * p.u[last]);

    bool corners_ok = true;
    for (std::size_t k : knots) {
        const double left = (p.u[k] - p.u[k - 1]) / g.width(k - 1);
        const double right = (p.u[k + 1] - p.u[k]) / g.width(k);
        // super: left > right; sub: left < right
        const double gap = sign * (right - left);
        if (gap >= 0.0)
            corners_ok = false;
        worst = std::max(worst, gap);
    }
    return {corners_ok && worst <= slack, worst};
}

// largest x on a 400-point log grid over [lo, hi] (refined by bisection) such that
// ok holds at every grid point up to x; returns 0 if ok fails already at lo
template <typename Pred>
double feasible_edge(Pred ok, double lo, double hi)
{
    const auto grid = log_grid(lo, hi, 400);
    std::size_t j = 0;
    while (j < grid.size() && ok(grid[j]))
        ++j;
    if (j == grid.size())
        return hi;
    if (j == 0)
        return 0.0;
    double a = std::log(grid[j - 1]), b = std::log(grid[j]);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        if (ok(std::exp(mid)))
            a = mid;
        else
            b = mid;
    }
    return std::exp(a);
}

double half_length(const Grid& g)
{
    return 0.5 * g.length();
}

LinearOptions tight()
{
    return {1e-13, 200};
}

} // namespace

VerifyResult verify_supersolution(const ProblemSpec& spec, const SolutionProfile& w, double slack,
                                  std::span<const double> corners, CellAverage avg)
{
    return verify_common(spec, w, slack, corners, avg, +1);
}

VerifyResult verify_subsolution(const ProblemSpec& spec, const SolutionProfile& v, double slack,
                                std::span<const double> corners, CellAverage avg)
{
    return verify_common(spec, v, slack, corners, avg, -1);
}

SupersolutionConstants supersolution_constants(const ProblemSpec& spec)
{
    if (!spec.G1)
        throw std::invalid_argument("supersolution construction requires (G1)");
    const auto [c1, t1, r1] = *spec.G1;
    const double rho = integral(spec.m + spec.n);
    if (!(rho > 0.0))
        throw std::invalid_argument("supersolution construction requires m + n not a.e. zero");
    const Homeomorphism& phi = spec.phi;
    const double c_omega = half_length(spec.m.grid());

    SupersolutionConstants k;
    k.K0 = phi.forward(t1 / c_omega) / rho;
    const double eps = 1.0 / (c1 * spec.mu * std::pow(c_omega, r1));
    k.K1 = feasible_edge([&](double x) { return std::pow(phi.inverse(x * rho), r1) <= x * eps; }, 1e-16, k.K0);
    if (!(k.K1 > 0.0))
        throw std::domain_error("supersolution construction: no kappa in [1e-16, K0] satisfies the (G1) bound");
    k.C = max_on(spec.f, t1);
    k.lambda0 = k.C > 0.0 ? std::min(k.K0, k.K1) / k.C : std::numeric_limits<double>::infinity();
    return k;
}

Supersolution build_supersolution(const ProblemSpec& spec)
{
    const SupersolutionConstants k = supersolution_constants(spec);
    const GridFunction weight = spec.m + spec.n;
    Supersolution out{SolutionProfile{weight, weight}};
    out.K0 = k.K0;
    out.K1 = k.K1;
    out.C = k.C;
    out.lambda0 = k.lambda0;
    if (!(spec.lambda < out.lambda0))
        throw std::domain_error("supersolution construction not applicable at this lambda (lambda >= lambda0 = " +
                                format_double(out.lambda0) + ")");
    out.kappa = spec.lambda * out.C;
    out.w = solve_linear(spec.phi, weight.scaled(out.kappa), tight());
    return out;
}

GridFunction subsolution_weight(const ProblemSpec& spec)
{
    if (!spec.F)
        throw std::invalid_argument("subsolution construction requires (F)");
    const double q = spec.F->q;
    const GridFunction delta = dist_to_boundary(spec.grid());
    return spec.m * delta.map([q](double d) { return std::pow(d, q); });
}

Subsolution build_subsolution(const ProblemSpec& spec, double c_des3)
{
    if (!spec.F)
        throw std::invalid_argument("subsolution construction requires (F)");
    if (!(c_des3 > 0.0))
        throw std::invalid_argument("subsolution construction requires c > 0");
    const auto [c0, t0, q] = *spec.F;
    const GridFunction weight = subsolution_weight(spec);
    const double rho_prime = integral(weight);
    if (!(rho_prime > 0.0))
        throw std::invalid_argument("subsolution construction requires m not a.e. zero");
    const Homeomorphism& phi = spec.phi;
    const double c_omega = half_length(spec.m.grid());

    Subsolution out{SolutionProfile{weight, weight}};
    out.epsilon0 = phi.forward(t0 / c_omega) / rho_prime;
    // the lower sandwich bound carries theta_under; folding it into c keeps
    // v >= c phi^{-1}(c eps) delta valid
    out.c_effective = c_des3 * std::min(1.0, support_data(weight).theta_under);
    out.M = 1.0 / (spec.lambda * c0 * std::pow(out.c_effective, q));
    const double ce = out.c_effective, M = out.M;
    out.epsilon1 =
        feasible_edge([&](double e) { return std::pow(phi.inverse(ce * e), q) >= M * e; }, 1e-16, out.epsilon0);
    if (!(out.epsilon1 > 0.0))
        throw std::domain_error("subsolution construction: empty feasible epsilon range");
    out.epsilon = 0.5 * std::min(out.epsilon0, out.epsilon1);
    out.v = solve_linear(phi, weight.scaled(out.epsilon), tight());
    return out;
}

Subsolution order_below(const ProblemSpec& spec, const Subsolution& sub, const Supersolution& super)
{
    const GridFunction weight = subsolution_weight(spec);
    const GridFunction cap = (spec.m + spec.n).scaled(super.kappa);
    Subsolution out = sub;
    for (int k = 0; k < 1100; ++k) {
        bool below = true;
        for (std::size_t i = 0; i < weight.size(); ++i) {
            if (out.epsilon * weight[i] > cap[i]) {
                below = false;
                break;
            }
        }
        if (below) {
            if (k > 0)
                out.v = solve_linear(spec.phi, weight.scaled(out.epsilon), tight());
            if (!pointwise_leq(out.v.u, super.w.u, 1e-12 * (1.0 + sup_norm(super.w.u))))
                throw std::domain_error("sub/supersolution pair is not ordered after shrinking epsilon");
            return out;
        }
        out.epsilon *= 0.5;
    }
    throw std::domain_error("epsilon m delta^q cannot be placed below kappa (m + n)");
}

double integrated_residual(const ProblemSpec& spec, const SolutionProfile& p, CellAverage avg)
{
    const Grid& g = p.u.grid();
    const std::vector<double> avg_rhs = cell_rhs(spec, p, avg);
    const double z0 = spec.phi.forward(p.du[0]);
    double acc = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(spec.phi.forward(p.du[i]) - z0 + acc));
        if (i < g.cells())
            acc += avg_rhs[i] * g.width(i);
    }
    return worst;
}

BetweenResult solve_between(const ProblemSpec& spec, const GridFunction& v, const GridFunction& w,
                            const BetweenOptions& opts)
{
    if (!pointwise_leq(v, w, 1e-12))
        throw std::invalid_argument("solve_between requires v <= w");
    const double top = sup_norm(w);
    BetweenResult out{solve_linear(spec.phi, rhs(spec, v.map(positive_part)), tight()), 0, 0.0, false, false, {}, 0.0};
    out.monotone_mode = nondecreasing_on(spec.f, top) && nondecreasing_on(spec.g, top);

    GridFunction u = v;
    for (int k = 1; k <= opts.max_iter; ++k) {
        GridFunction src = u;
        if (!out.monotone_mode) {
            std::vector<double> c(u.size());
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] = std::clamp(u[i], v[i], w[i]);
            src = GridFunction(u.grid_ptr(), std::move(c));
        }
        SolutionProfile next = k == 1 ? out.profile : solve_linear(spec.phi, rhs(spec, src.map(positive_part)), tight());
        double gap = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            gap = std::max(gap, std::abs(next.u[i] - u[i]));
        out.iterate_norms.push_back(sup_norm(next.u));
        out.iterations = k;
        out.cauchy_gap = gap;
        u = next.u;
        out.profile = std::move(next);
        if (gap < opts.tol) {
            out.converged = true;
            break;
        }
    }
    out.residual = integrated_residual(spec, out.profile, CellAverage::Trapezoid);
    return out;
}

ShotResult shoot(const ProblemSpec& spec, double s, const ShootOptions& opts)
{
    if (!(s > 0.0))
        throw std::invalid_argument("shoot requires s > 0");
    if (opts.substeps < 1)
        throw std::invalid_argument("shoot requires at least one step per cell");
    const Grid& g = spec.m.grid();
    const Homeomorphism& phi = spec.phi;
    const std::size_t N = g.size();
    std::vector<double> u(N, 0.0), z(N, 0.0);

    const double lam = spec.lambda, mu = spec.mu;
    z[0] = phi.forward(s);

    ShotResult out{0.0, false, false, 0.0, SolutionProfile{spec.m, spec.m, 0.0, 0.0, 0.0}};

    // one RK4 step of length h from (x0 in cell i, u0, z0)
    auto step = [&](std::size_t i, double x0, double u0, double z0, double h, double& u1, double& z1) {
        const double xi = g[i], w = g.width(i);
        const double m0 = spec.m[i], dm = spec.m[i + 1] - m0;
        const double n0 = spec.n[i], dn = spec.n[i + 1] - n0;
        auto force = [&](double x, double uu) {
            const double t = (x - xi) / w;
            const double up = positive_part(uu);
            return lam * (m0 + t * dm) * spec.f(up) + mu * (n0 + t * dn) * spec.g(up);
        };
        const double k1u = phi.inverse(z0), k1z = -force(x0, u0);
        const double k2u = phi.inverse(z0 + 0.5 * h * k1z), k2z = -force(x0 + 0.5 * h, u0 + 0.5 * h * k1u);
        const double k3u = phi.inverse(z0 + 0.5 * h * k2z), k3z = -force(x0 + 0.5 * h, u0 + 0.5 * h * k2u);
        const double k4u = phi.inverse(z0 + h * k3z), k4z = -force(x0 + h, u0 + h * k3u);
        u1 = u0 + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        z1 = z0 + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    };

    const double end_guard = g.b() - 1e-12 * g.length();
    std::size_t filled = 0;
    for (std::size_t i = 0; i < g.cells() && !out.blew_up; ++i) {
        const double h = g.width(i) / opts.substeps;
        double uc = u[i], zc = z[i];
        for (int k = 0; k < opts.substeps; ++k) {
            const double x0 = g[i] + k * h;
            double un, zn;
            step(i, x0, uc, zc, h, un, zn);
            if (!out.crossed && un <= 0.0 && x0 + h < end_guard) {
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    double ut, zt;
                    step(i, x0, uc, zc, mid * h, ut, zt);
                    if (ut <= 0.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                out.crossed = true;
                out.x_cross = x0 + hi * h;
            }
            uc = un;
            zc = zn;
            if (!std::isfinite(uc) || !std::isfinite(zc) || std::abs(uc) > kBlowUp) {
                out.blew_up = true;
                break;
            }
        }
        if (out.blew_up)
            break;
        u[i + 1] = uc;
        z[i + 1] = zc;
        filled = i + 1;
    }
    for (std::size_t i = filled + 1; i < N; ++i) {
        u[i] = u[filled];
        z[i] = z[filled];
    }

    if (out.crossed)
        out.terminal = -(g.b() - out.x_cross);
    else if (out.blew_up)
        out.terminal = u[filled] >= 0.0 ? kBlowUp : -g.length();
    else
        out.terminal = u[N - 1];

    std::vector<double> du(N);
    for (std::size_t i = 0; i < N; ++i)
        du[i] = phi.inverse(z[i]);
    out.profile = SolutionProfile{GridFunction(spec.grid(), std::move(u)), GridFunction(spec.grid(), std::move(du)),
                                  z[0], 0.0, 0.0};
    out.profile.boundary_defect = std::abs(out.profile.u[N - 1]);
    if (!out.blew_up)
        out.profile.residual = integrated_residual(spec, out.profile, CellAverage::Simpson);
    else
        out.profile.residual = std::numeric_limits<double>::infinity();
    return out;
}

bool in_positive_cone(const SolutionProfile& p)
{
    const std::size_t last = p.u.size() - 1;
    for (std::size_t i = 1; i < last; ++i) {
        if (!(p.u[i] > 0.0))
            return false;
    }
    return p.du[0] > 0.0 && p.du[last] < 0.0;
}

std::vector<ShootingRoot> scan_shooting(const ProblemSpec& spec, const ScanOptions& opts)
{
    if (!(opts.s_max > 0.0) || opts.count < 2)
        throw std::invalid_argument("scan_shooting requires s_max > 0 and count >= 2");
    if (!(opts.s_min_ratio > 0.0 && opts.s_min_ratio < 1.0))
        throw std::invalid_argument("scan_shooting requires 0 < s_min_ratio < 1");
    const auto s_grid = log_grid(opts.s_max * opts.s_min_ratio, opts.s_max, static_cast<std::size_t>(opts.count));
    std::vector<double> D(s_grid.size());
    parallel_for(s_grid.size(), [&](std::size_t k) { D[k] = shoot(spec, s_grid[k], opts.shoot).terminal; });

    auto defect = [&](double log_s) { return shoot(spec, std::exp(log_s), opts.shoot).terminal; };

    // bisection in ln s between a and b with opposite signs of the defect
    auto refine = [&](double a, double b, double Da) {
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= std::min(a, b) || mid >= std::max(a, b))
                break;
            const double Dm = defect(mid);
            if (Dm == 0.0)
                return mid;
            if ((Dm > 0.0) == (Da > 0.0)) {
                a = mid;
                Da = Dm;
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    };

    std::vector<double> roots;
    for (std::size_t k = 0; k < D.size(); ++k) {
        const double lk = std::log(s_grid[k]);
        if (D[k] == 0.0) {
            roots.push_back(lk);
            continue;
        }
        if (k + 1 < D.size() && D[k + 1] != 0.0 && (D[k] > 0.0) != (D[k + 1] > 0.0))
            roots.push_back(refine(lk, std::log(s_grid[k + 1]), D[k]));
    }

    // a hump of the defect that stays on one side of zero between samples can
    // hide a pair of roots; look for it with golden-section search
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t k = 1; k + 1 < D.size(); ++k) {
        const int sgn = D[k] < 0.0 ? 1 : -1; // maximise when negative, minimise when positive
        const bool extremum = sgn * D[k] >= sgn * D[k - 1] && sgn * D[k] >= sgn * D[k + 1] &&
                              (D[k - 1] > 0.0) == (D[k] > 0.0) && (D[k + 1] > 0.0) == (D[k] > 0.0);
        if (!extremum || D[k] == 0.0)
            continue;
        double lo = std::log(s_grid[k - 1]), hi = std::log(s_grid[k + 1]);
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = sgn * defect(x1), f2 = sgn * defect(x2);
        for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
            if (f1 > f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = sgn * defect(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = sgn * defect(x2);
            }
        }
        const double peak = f1 > f2 ? x1 : x2;
        const double Dpeak = sgn * std::max(f1, f2);
        if ((Dpeak > 0.0) == (D[k] > 0.0) && Dpeak != 0.0)
            continue;
        if (Dpeak == 0.0) {
            roots.push_back(peak);
            continue;
        }
        roots.push_back(refine(std::log(s_grid[k - 1]), peak, D[k - 1]));
        roots.push_back(refine(peak, std::log(s_grid[k + 1]), Dpeak));
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots) {
        if (unique.empty() || std::exp(r) - std::exp(unique.back()) > 1e-6 * std::exp(r))
            unique.push_back(r);
    }

    std::vector<std::optional<ShootingRoot>> found(unique.size());
    parallel_for(unique.size(), [&](std::size_t k) {
        const double s = std::exp(unique[k]);
        ShotResult shot = shoot(spec, s, opts.shoot);
        if (shot.blew_up || !in_positive_cone(shot.profile))
            return;
        found[k] = ShootingRoot{s, shot.terminal, shot.profile, shot.profile.residual};
    });
    std::vector<ShootingRoot> out;
    for (auto& r : found) {
        if (r)
            out.push_back(std::move(*r));
    }
    std::sort(out.begin(), out.end(),
              [](const ShootingRoot& x, const ShootingRoot& y) { return sup_norm(x.profile.u) < sup_norm(y.profile.u); });
    return out;
}

} // namespace phibvp
