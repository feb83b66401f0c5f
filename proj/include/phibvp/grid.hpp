#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phibvp {

/// Strictly increasing node set over a closed interval [a, b].
class Grid {
public:
    explicit Grid(std::vector<double> nodes);

    static std::shared_ptr<const Grid> uniform(double a, double b, std::size_t count);
    static std::shared_ptr<const Grid> make(std::vector<double> nodes);

    double a() const { return nodes_.front(); }
    double b() const { return nodes_.back(); }
    double length() const { return b() - a(); }
    std::size_t size() const { return nodes_.size(); }
    std::size_t cells() const { return nodes_.size() - 1; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double width(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }
    std::span<const double> nodes() const { return nodes_; }

    /// Index of the cell [x_i, x_{i+1}] containing x (clamped to the interval).
    std::size_t cell_of(double x) const;

    bool operator==(const Grid& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Piecewise-linear function given by its values at the grid nodes.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values);

    static GridFunction constant(GridPtr grid, double c);
    static GridFunction sample(GridPtr grid, const std::function<double(double)>& fn);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    /// Linear interpolation between nodes.
    double operator()(double x) const;

    bool same_grid(const GridFunction& other) const;

    /// Nodewise combination; throws std::invalid_argument on grid mismatch.
    GridFunction combine(const GridFunction& other,
                         const std::function<double(double, double)>& op) const;
    GridFunction map(const std::function<double(double)>& op) const;
    GridFunction scaled(double factor) const;

    friend GridFunction operator+(const GridFunction& lhs, const GridFunction& rhs);
    friend GridFunction operator-(const GridFunction& lhs, const GridFunction& rhs);
    friend GridFunction operator*(const GridFunction& lhs, const GridFunction& rhs);
    friend GridFunction operator*(double factor, const GridFunction& f) { return f.scaled(factor); }

    bool is_nonnegative() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// alpha_h, beta_h: edges of the essential support of a nonnegative weight h;
/// theta_bar = (alpha_h + beta_h) / 2; theta_under = min{1/(beta_h - a), 1/(b - alpha_h)}.
struct SupportData {
    double alpha_h = 0.0;
    double beta_h = 0.0;
    double theta_bar = 0.0;
    double theta_under = 0.0;
};

/// H(x_i) = \int_a^{x_i} h by the composite trapezoid rule (exact for piecewise-linear h).
GridFunction cumulative_integral(const GridFunction& h);

/// Total mass \int_a^b h.
double integral(const GridFunction& h);

/// Exact \int_a^x h for arbitrary x, given H = cumulative_integral(h).
double antiderivative_at(const GridFunction& h, const GridFunction& H, double x);

/// Support quantities of a nonnegative weight. Mass below `tol` counts as zero;
/// a negative tol selects the default 1e-12 * total mass.
SupportData support_data(const GridFunction& h, double tol = -1.0);

/// delta(x) = min(x - a, b - x) at the nodes.
GridFunction dist_to_boundary(const GridPtr& grid);

double sup_norm(const GridFunction& u);

/// u <= v + slack at every node; throws std::invalid_argument on grid mismatch.
bool pointwise_leq(const GridFunction& u, const GridFunction& v, double slack = 0.0);

/// Largest nodewise value of u - v.
double max_excess(const GridFunction& u, const GridFunction& v);

/// Writes `x,<name>` rows with round-trip precision.
void write_csv(std::ostream& out, const GridFunction& f, const std::string& name = "value");
void write_csv(std::ostream& out, std::span<const GridFunction> columns,
               std::span<const std::string> names);

/// Reads the first column as nodes and the named column (or the second column
/// when `column` is empty) as values.
GridFunction read_csv(std::istream& in, const std::string& column = {});

std::string format_double(double x);

} // namespace phibvp
