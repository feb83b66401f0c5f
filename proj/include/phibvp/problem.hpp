#pragma once

#include "phibvp/grid.hpp"
#include "phibvp/homeomorphism.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

/// Scalar map [0, inf) -> [0, inf) used for f and g.
struct Nonlinearity {
    std::string label;
    std::function<double(double)> eval;

    double operator()(double t) const { return eval(t); }
};

/// t -> t^q.
Nonlinearity power_nonlinearity(double q);

/// Piecewise-linear interpolation of samples; continued linearly past the last sample.
Nonlinearity table_nonlinearity(std::vector<double> t, std::vector<double> values);

/// f(t) >= c0 t^q on [0, t0].
struct ConditionF {
    double c0, t0, q;
};

/// g(t) <= c1 t^{r1} on [0, t1].
struct ConditionG1 {
    double c1, t1, r1;
};

/// g(t) >= c2 t^{r2} on [t2, inf).
struct ConditionG2 {
    double c2, t2, r2;
};

/// -phi(u')' = lambda m f(u) + mu n g(u) on (a, b), u = 0 at a and b.
struct ProblemSpec {
    Homeomorphism phi;
    GridFunction m;
    GridFunction n;
    double lambda = 0.0;
    double mu = 0.0;
    Nonlinearity f;
    Nonlinearity g;
    std::optional<ConditionF> F;
    std::optional<ConditionG1> G1;
    std::optional<ConditionG2> G2;

    const GridPtr& grid() const { return m.grid_ptr(); }

    /// Checks signs, grids and spot-checks the asserted structural conditions.
    /// Throws std::invalid_argument naming the failing constraint.
    void validate() const;

    ProblemSpec with_lambda(double value) const;
};

/// lambda m f(u) + mu n g(u) at the nodes. Entries of u below -1e-12 are rejected,
/// smaller negative roundoff is clamped to zero.
GridFunction rhs(const ProblemSpec& spec, const GridFunction& u);

/// Same at one point, with the weights interpolated.
double rhs_at(const ProblemSpec& spec, double x, double u);

/// Largest sampled value of f on [0, t].
double max_on(const Nonlinearity& f, double t, std::size_t samples = 20001);

/// f sampled on [0, t] never decreases.
bool nondecreasing_on(const Nonlinearity& f, double t, std::size_t samples = 2001);

} // namespace phibvp
