#pragma once

#include "phibvp/linear_solver.hpp"
#include "phibvp/problem.hpp"

#include <span>
#include <vector>

namespace phibvp {

struct VerifyResult {
    bool ok = false;
    double max_violation = 0.0;
};

/// How the right-hand side is averaged over a cell. Trapezoid matches the
/// representation used by solve_linear; Simpson (with a cubic Hermite
/// midpoint) suits profiles that come from an ODE integrator.
enum class CellAverage { Trapezoid, Simpson };

/// -(phi(w'(x_{i+1})) - phi(w'(x_i))) / (x_{i+1} - x_i) >= cell average of rhs(w) on
/// every cell, w >= -slack at the ends, and w'(t-) > w'(t+) at each corner t.
/// Corners must be grid nodes; slopes there are one-sided extrapolations.
VerifyResult verify_supersolution(const ProblemSpec& spec, const SolutionProfile& w, double slack,
                                  std::span<const double> corners = {},
                                  CellAverage avg = CellAverage::Trapezoid);

/// Mirror image: the inequalities are reversed and v <= slack at the ends,
/// v'(t-) < v'(t+) at corners.
VerifyResult verify_subsolution(const ProblemSpec& spec, const SolutionProfile& v, double slack,
                                std::span<const double> corners = {},
                                CellAverage avg = CellAverage::Trapezoid);

struct Supersolution {
    SolutionProfile w;
    double kappa = 0.0; // w = S(kappa (m + n))
    double lambda0 = 0.0;
    double K0 = 0.0;
    double K1 = 0.0;
    double C = 0.0;     // max f on [0, t1]
};

struct SupersolutionConstants {
    double K0 = 0.0;
    double K1 = 0.0;
    double C = 0.0;
    double lambda0 = 0.0; // min{K0, K1} / C
};

/// The lambda-independent part of the construction. Requires (G1) and m + n not a.e. zero.
SupersolutionConstants supersolution_constants(const ProblemSpec& spec);

/// Requires (G1) and m + n not a.e. zero. Throws std::domain_error when
/// spec.lambda >= lambda0.
Supersolution build_supersolution(const ProblemSpec& spec);

struct Subsolution {
    SolutionProfile v;
    double epsilon = 0.0; // v = S(epsilon m delta^q)
    double epsilon0 = 0.0;
    double epsilon1 = 0.0;
    double M = 0.0;
    double c_effective = 0.0;
};

/// Requires (F) and m not a.e. zero; c_des3 comes from estimate_c_des3 for
/// the weight m delta^q. Throws std::domain_error when no epsilon is feasible.
Subsolution build_subsolution(const ProblemSpec& spec, double c_des3);

/// m delta^q on the problem grid.
GridFunction subsolution_weight(const ProblemSpec& spec);

/// Halves epsilon until epsilon m delta^q <= kappa (m + n) at every node, re-solves,
/// and confirms v <= w. Throws std::domain_error if ordering still fails.
Subsolution order_below(const ProblemSpec& spec, const Subsolution& sub, const Supersolution& super);

struct BetweenOptions {
    int max_iter = 200;
    double tol = 1e-10;
};

struct BetweenResult {
    SolutionProfile profile;
    int iterations = 0;
    double cauchy_gap = 0.0;
    bool converged = false;
    bool monotone_mode = false;
    std::vector<double> iterate_norms;
    double residual = 0.0; // max |phi(u') - phi(u'(a)) + \int_a^x rhs(u)|, trapezoid rule
};

/// Truncated Picard iteration u_{k+1} = S(rhs(clamp(u_k, v, w))) from u_0 = v.
/// When f and g are nondecreasing on [0, max w] clamping is skipped (monotone mode).
/// Non-convergence is reported through `converged`, not thrown.
BetweenResult solve_between(const ProblemSpec& spec, const GridFunction& v, const GridFunction& w,
                            const BetweenOptions& opts = {});

/// Integrated residual of a profile against the problem, with the given cell rule.
double integrated_residual(const ProblemSpec& spec, const SolutionProfile& p, CellAverage avg);

struct ShotResult {
    double terminal = 0.0; // u(b), or -(b - x_cross) when u vanished first
    bool crossed = false;
    bool blew_up = false;
    double x_cross = 0.0;
    SolutionProfile profile;
};

struct ShootOptions {
    int substeps = 1; // RK4 steps per grid cell
};

/// Integrates u' = phi^{-1}(w), w' = -lambda m f(u+) - mu n g(u+) from u(a) = 0, w(a) = phi(s).
ShotResult shoot(const ProblemSpec& spec, double s, const ShootOptions& opts = {});

struct ShootingRoot {
    double s = 0.0;
    double terminal = 0.0;
    SolutionProfile profile;
    double residual = 0.0;
};

struct ScanOptions {
    double s_max = 100.0;
    int count = 200;
    double s_min_ratio = 1e-14; // scan starts at s_max * s_min_ratio
    ShootOptions shoot;
};

/// All roots of the shooting defect found on a log-spaced s grid, refined by
/// bisection, deduplicated (relative 1e-6) and filtered to profiles with
/// u > 0 inside and u'(a) > 0 > u'(b). Sorted by sup norm.
std::vector<ShootingRoot> scan_shooting(const ProblemSpec& spec, const ScanOptions& opts);

/// u > 0 at interior nodes and du(a) > 0 > du(b).
bool in_positive_cone(const SolutionProfile& p);

} // namespace phibvp
