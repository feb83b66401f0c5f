#pragma once

#include "phibvp/nonlinear_solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

struct BranchSolution {
    double sup_norm = 0.0;
    double initial_slope = 0.0;
    bool in_cone = false;
};

struct BranchPoint {
    double lambda = 0.0;
    std::vector<BranchSolution> solutions; // ascending sup norm
    std::string error;                     // non-empty if the scan failed at this lambda
};

struct BranchDiagram {
    std::vector<BranchPoint> points; // ascending lambda
    std::optional<double> lambda_star_estimate;
};

/// u >= theta_under(n) ||u|| delta - slack at every node. Throws std::domain_error if n = 0 a.e.
bool check_cone_membership(const GridFunction& u, const GridFunction& n, double slack);

/// Shooting scan at each lambda of an ascending positive grid. Failures at one
/// lambda are recorded in BranchPoint::error and do not stop the sweep. The
/// threshold estimate brackets the first drop from >= 1 solution to none and
/// is refined by bisection on existence to relative width rel_tol.
BranchDiagram sweep(const ProblemSpec& spec, const std::vector<double>& lambda_grid, const ScanOptions& scan,
                    double rel_tol = 1e-3);

struct Lambda1Certificate {
    double lambda1 = 0.0;
    double rho = 0.0;
    double t_under = 0.0; // phi(t / c_omega) > mu N t^{r1} on (0, t_under)
    double t_bar = 0.0;   // phi^{-1}(c t^{r2}) >= 2t / c for t >= t_bar (inf if not found)
    double c_g2 = 0.0;    // c for the weight c2 mu theta_n^{r2} n delta^{r2}
    double N = 0.0;
    double M = 0.0;
    double C = 0.0; // max f on [0, R]
    bool R_admissible = false; // R > max{t2, t_bar}
};

/// Requires (G1) and (G2). Throws std::domain_error when lambda1 <= 0.
Lambda1Certificate compute_lambda1(const ProblemSpec& spec, double R);

struct LambdaStarResult {
    double estimate = 0.0;
    double lo = 0.0; // largest lambda seen with a solution
    double hi = 0.0; // smallest lambda seen without one
    std::vector<std::pair<double, bool>> samples;
    bool no_gap = true;           // every probe below the estimate found a solution
    std::vector<double> gap_at;   // probes that stayed empty after 4x s-grid refinement
};

/// Bisection on the existence of a positive solution. Requires a solution at lo
/// and none at hi (std::invalid_argument otherwise); stops once hi - lo <= rel_tol * hi.
LambdaStarResult lambda_star_bisect(const ProblemSpec& spec, double lo, double hi, double rel_tol,
                                    const ScanOptions& scan);

/// lambda,branch_index,sup_norm,initial_slope,in_cone rows.
void write_diagram_csv(std::ostream& out, const BranchDiagram& diagram);

} // namespace phibvp
