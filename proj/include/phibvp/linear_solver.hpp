#pragma once

#include "phibvp/grid.hpp"
#include "phibvp/homeomorphism.hpp"

#include <span>
#include <vector>

namespace phibvp {

/// Solution of -phi(u')' = h with u(a) = u(b) = 0 in the integrated form
/// phi(u'(x)) = c_star - H(x), H the antiderivative of h.
struct SolutionProfile {
    GridFunction u;
    GridFunction du;
    double c_star = 0.0;
    double residual = 0.0;        // max |phi(du) + H - c_star| at the nodes
    double boundary_defect = 0.0; // |u(b)|
};

struct LinearOptions {
    double tol = 1e-13;
    int max_iter = 200;
};

/// Finds c with \int_a^b phi^{-1}(c - H) = 0 by bisection on [min H, max H].
/// The stopping rule is |F(c)| <= tol * \int |phi^{-1}(c - H)|, or a bracket
/// that can no longer be split. Throws std::runtime_error when max_iter
/// bisection steps do not reach either.
SolutionProfile solve_linear(const Homeomorphism& phi, const GridFunction& h, const LinearOptions& opts = {});

/// S(h1) <= S(h2) + slack at every node. Throws std::invalid_argument unless h1 <= h2.
bool monotone_check(const Homeomorphism& phi, const GridFunction& h1, const GridFunction& h2, double slack);

/// Pointwise two-sided bound for S(h), h >= 0 and not a.e. zero:
/// lower = theta_under * min_bracket * delta, upper = phi^{-1}(\int h) * delta.
struct SandwichBounds {
    GridFunction lower;
    GridFunction upper;
    double left_integral = 0.0;  // \int_a^{theta} phi^{-1}(\int_y^{theta} h) dy
    double right_integral = 0.0; // \int_{theta}^b phi^{-1}(\int_{theta}^y h) dy
    double min_bracket = 0.0;
    SupportData support;
};

SandwichBounds lemma21_bounds(const Homeomorphism& phi, const GridFunction& h);

/// u >= theta_under(h) * ||u|| * delta - slack at every node, for u = S(h).
bool lemma21_cone_bound(const Homeomorphism& phi, const GridFunction& h, double slack);
bool cone_bound_holds(const GridFunction& u, const SupportData& support, double slack);

/// min of the two bracket integrals with h scaled by M.
double des3_bracket(const Homeomorphism& phi, const GridFunction& h, double M);

/// Largest c in (1e-12, 1e6] with des3_bracket(M) >= c phi^{-1}(c M) for every M in M_grid,
/// refined between grid points around each local minimum of the per-M bound.
/// Throws std::domain_error when no c in the range passes.
double estimate_c_des3(const Homeomorphism& phi, const GridFunction& h, std::span<const double> M_grid);

/// Re-checks des3 for a given c on an arbitrary M grid.
bool check_c_des3(const Homeomorphism& phi, const GridFunction& h, double c, std::span<const double> M_grid);

/// count points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

} // namespace phibvp
