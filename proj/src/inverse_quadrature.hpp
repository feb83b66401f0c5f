#pragma once

#include "phibvp/grid.hpp"
#include "phibvp/homeomorphism.hpp"

namespace phibvp::detail {

struct Sums {
    double value = 0.0;
    double magnitude = 0.0; // integral of the absolute value

    Sums& operator+=(const Sums& o)
    {
        value += o.value;
        magnitude += o.magnitude;
        return *this;
    }
};

// Integrates y -> phi^{-1}(scale * (c - H(y))) where H is the exact
// antiderivative of the piecewise-linear h, so H is quadratic on each cell.
// Cells are split at the zeros of c - H and where scale * (c - H) reaches a
// critical value of phi; pieces touching such a point are graded geometrically
// toward it, since phi^{-1} is not smooth there (at 0 typically).
class InverseIntegrator {
public:
    InverseIntegrator(const Homeomorphism& phi, const GridFunction& h, const GridFunction& H);

    // over the whole cell i
    Sums cell(std::size_t i, double c, double scale = 1.0) const;

    // over [x0, x1] (x0 <= x1, both inside the grid)
    Sums range(double x0, double x1, double c, double scale = 1.0) const;

    // over [tau0, tau1] measured from the left node of cell i
    Sums cell_part(std::size_t i, double tau0, double tau1, double c, double scale) const;

    // H at arbitrary x
    double H_at(double x) const;

private:
    const Homeomorphism& phi_;
    const GridFunction& h_;
    const GridFunction& H_;
};

} // namespace phibvp::detail
