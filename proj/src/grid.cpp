#include "phibvp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace phibvp {

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 3)
        throw std::invalid_argument("grid needs at least 3 nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i] < nodes_[i + 1]) || !std::isfinite(nodes_[i + 1]))
            throw std::invalid_argument("grid nodes must be finite and strictly increasing");
    }
}

GridPtr Grid::uniform(double a, double b, std::size_t count)
{
    if (!(a < b))
        throw std::invalid_argument("grid requires a < b");
    if (count < 3)
        throw std::invalid_argument("grid needs at least 3 nodes");
    std::vector<double> nodes(count);
    const double h = (b - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        nodes[i] = a + h * static_cast<double>(i);
    nodes.back() = b;
    return std::make_shared<const Grid>(std::move(nodes));
}

GridPtr Grid::make(std::vector<double> nodes)
{
    return std::make_shared<const Grid>(std::move(nodes));
}

std::size_t Grid::cell_of(double x) const
{
    if (x <= nodes_.front())
        return 0;
    if (x >= nodes_.back())
        return cells() - 1;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_)
        throw std::invalid_argument("grid function without grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("grid function length does not match grid");
}

GridFunction GridFunction::constant(GridPtr grid, double c)
{
    const std::size_t n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, c));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& fn)
{
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = fn((*grid)[i]);
    return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::operator()(double x) const
{
    const std::size_t i = grid_->cell_of(x);
    const double x0 = (*grid_)[i];
    const double w = grid_->width(i);
    const double s = std::clamp((x - x0) / w, 0.0, 1.0);
    return values_[i] + s * (values_[i + 1] - values_[i]);
}

bool GridFunction::same_grid(const GridFunction& other) const
{
    return grid_ == other.grid_ || *grid_ == *other.grid_;
}

GridFunction GridFunction::combine(const GridFunction& other,
                                   const std::function<double(double, double)>& op) const
{
    if (!same_grid(other))
        throw std::invalid_argument("grid functions live on different grids");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = op(values_[i], other.values_[i]);
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::map(const std::function<double(double)>& op) const
{
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), op);
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::scaled(double factor) const
{
    return map([factor](double x) { return factor * x; });
}

GridFunction operator+(const GridFunction& lhs, const GridFunction& rhs)
{
    return lhs.combine(rhs, [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& lhs, const GridFunction& rhs)
{
    return lhs.combine(rhs, [](double x, double y) { return x - y; });
}

GridFunction operator*(const GridFunction& lhs, const GridFunction& rhs)
{
    return lhs.combine(rhs, [](double x, double y) { return x * y; });
}

bool GridFunction::is_nonnegative() const
{
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x >= 0.0; });
}

GridFunction cumulative_integral(const GridFunction& h)
{
    const Grid& g = h.grid();
    std::vector<double> H(g.size(), 0.0);
    for (std::size_t i = 0; i < g.cells(); ++i)
        H[i + 1] = H[i] + 0.5 * g.width(i) * (h[i] + h[i + 1]);
    return GridFunction(h.grid_ptr(), std::move(H));
}

double integral(const GridFunction& h)
{
    const Grid& g = h.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
        sum += 0.5 * g.width(i) * (h[i] + h[i + 1]);
    return sum;
}

double antiderivative_at(const GridFunction& h, const GridFunction& H, double x)
{
    const Grid& g = h.grid();
    const std::size_t i = g.cell_of(x);
    const double dx = std::clamp(x, g.a(), g.b()) - g[i];
    return H[i] + 0.5 * dx * (h[i] + h(x));
}

namespace {

// Smallest tau in [0, w] with  H0 + h0*tau + (h1-h0)/(2w)*tau^2 = level, assuming the
// left side increases from below `level` to at least `level` on the cell.
double cell_crossing(double H0, double h0, double h1, double w, double level)
{
    const double qa = 0.5 * (h1 - h0) / w;
    const double qb = h0;
    const double qc = H0 - level;
    double lo = 0.0, hi = w;
    // the quadratic is nondecreasing on the cell for nonnegative h, so bisection is safe
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = (qa * mid + qb) * mid + qc;
        if (val > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

} // namespace

SupportData support_data(const GridFunction& h, double tol)
{
    const Grid& g = h.grid();
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] < 0.0)
            throw std::invalid_argument("support_data requires a nonnegative weight");
    }
    const GridFunction H = cumulative_integral(h);
    const double total = H[H.size() - 1];
    if (tol < 0.0)
        tol = 1e-12 * total;
    if (!(total > tol) || total <= 0.0)
        throw std::domain_error("weight has no mass (h = 0 a.e.)");

    SupportData s;
    // alpha: largest x with \int_a^x h <= tol
    {
        std::size_t i = 0;
        while (i < g.cells() && H[i + 1] <= tol)
            ++i;
        s.alpha_h = g[i] + cell_crossing(H[i], h[i], h[i + 1], g.width(i), tol);
    }
    // beta: smallest x with \int_x^b h <= tol
    {
        std::size_t i = g.cells();
        while (i > 0 && total - H[i - 1] <= tol)
            --i;
        // cell [x_{i-1}, x_i]; mirror it so the mass grows from the right end
        const std::size_t c = i - 1;
        const double w = g.width(c);
        const double tau = cell_crossing(0.0, h[c + 1], h[c], w, tol - (total - H[c + 1]));
        s.beta_h = g[c + 1] - tau;
    }
    s.theta_bar = 0.5 * (s.alpha_h + s.beta_h);
    s.theta_under = std::min(1.0 / (s.beta_h - g.a()), 1.0 / (g.b() - s.alpha_h));
    return s;
}

GridFunction dist_to_boundary(const GridPtr& grid)
{
    const double a = grid->a(), b = grid->b();
    return GridFunction::sample(grid, [a, b](double x) { return std::min(x - a, b - x); });
}

double sup_norm(const GridFunction& u)
{
    double m = 0.0;
    for (double v : u.values())
        m = std::max(m, std::abs(v));
    return m;
}

bool pointwise_leq(const GridFunction& u, const GridFunction& v, double slack)
{
    if (!u.same_grid(v))
        throw std::invalid_argument("grid functions live on different grids");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > v[i] + slack)
            return false;
    }
    return true;
}

double max_excess(const GridFunction& u, const GridFunction& v)
{
    if (!u.same_grid(v))
        throw std::invalid_argument("grid functions live on different grids");
    double m = -INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i)
        m = std::max(m, u[i] - v[i]);
    return m;
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const GridFunction& f, const std::string& name)
{
    const std::string names[] = {name};
    write_csv(out, std::span<const GridFunction>(&f, 1), names);
}

void write_csv(std::ostream& out, std::span<const GridFunction> columns,
               std::span<const std::string> names)
{
    if (columns.empty() || columns.size() != names.size())
        throw std::invalid_argument("csv needs one name per column");
    for (const auto& c : columns) {
        if (!c.same_grid(columns.front()))
            throw std::invalid_argument("csv columns live on different grids");
    }
    out << "x";
    for (const auto& n : names)
        out << ',' << n;
    out << '\n';
    const Grid& g = columns.front().grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << format_double(g[i]);
        for (const auto& c : columns)
            out << ',' << format_double(c[i]);
        out << '\n';
    }
}

GridFunction read_csv(std::istream& in, const std::string& column)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("csv: missing header");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            header.push_back(cell);
    }
    if (header.size() < 2 || header[0] != "x")
        throw std::runtime_error("csv: header must start with 'x' and name a value column");
    std::size_t col = 1;
    if (!column.empty()) {
        auto it = std::find(header.begin(), header.end(), column);
        if (it == header.end() || it == header.begin())
            throw std::runtime_error("csv: no column named '" + column + "'");
        col = static_cast<std::size_t>(it - header.begin());
    }
    std::vector<double> xs, vs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("csv: bad number on line " + std::to_string(lineno));
            }
        }
        if (row.size() != header.size())
            throw std::runtime_error("csv: wrong column count on line " + std::to_string(lineno));
        xs.push_back(row[0]);
        vs.push_back(row[col]);
    }
    return GridFunction(Grid::make(std::move(xs)), std::move(vs));
}

} // namespace phibvp
