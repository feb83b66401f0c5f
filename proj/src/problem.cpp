#include "phibvp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phibvp {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument("problem: constraint violated: " + what);
}

double clamp_state(double u)
{
    if (u < -1e-12)
        throw std::invalid_argument("rhs: negative state " + format_double(u));
    return u < 0.0 ? 0.0 : u;
}

} // namespace

Nonlinearity power_nonlinearity(double q)
{
    if (!(q > 0.0) || !std::isfinite(q))
        throw std::invalid_argument("power nonlinearity needs q > 0");
    std::ostringstream os;
    os << "power:" << q;
    if (q == 1.0)
        return {os.str(), [](double t) { return t; }};
    if (q == 2.0)
        return {os.str(), [](double t) { return t * t; }};
    if (q == 0.5)
        return {os.str(), [](double t) { return std::sqrt(t); }};
    return {os.str(), [q](double t) { return std::pow(t, q); }};
}

Nonlinearity table_nonlinearity(std::vector<double> t, std::vector<double> values)
{
    if (t.size() < 2 || t.size() != values.size())
        throw std::invalid_argument("table nonlinearity needs at least two (t, value) pairs");
    if (t.front() != 0.0)
        throw std::invalid_argument("table nonlinearity must start at t = 0");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!(t[i] < t[i + 1]))
            throw std::invalid_argument("table nonlinearity needs strictly increasing t");
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("table nonlinearity values must be finite and nonnegative");
    }
    auto eval = [t = std::move(t), v = std::move(values)](double x) {
        std::size_t i;
        if (x >= t.back())
            i = t.size() - 2;
        else
            i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
        const double s = (x - t[i]) / (t[i + 1] - t[i]);
        return std::max(0.0, v[i] + s * (v[i + 1] - v[i]));
    };
    return {"table", std::move(eval)};
}

void ProblemSpec::validate() const
{
    require(lambda > 0.0 && std::isfinite(lambda), "lambda > 0");
    require(mu > 0.0 && std::isfinite(mu), "mu > 0");
    require(m.same_grid(n), "m and n on the same grid");
    require(m.is_nonnegative(), "m >= 0");
    require(n.is_nonnegative(), "n >= 0");
    require(static_cast<bool>(f.eval) && static_cast<bool>(g.eval), "f and g defined");
    const int samples = 1000;
    if (F) {
        require(F->c0 > 0.0 && F->t0 > 0.0 && F->q > 0.0, "(F) constants c0, t0, q > 0");
        for (int k = 0; k <= samples; ++k) {
            const double t = F->t0 * k / samples;
            const double bound = F->c0 * std::pow(t, F->q);
            require(f(t) >= bound * (1.0 - 1e-12), "(F): f(t) >= c0 t^q on [0, t0]");
        }
    }
    if (G1) {
        require(G1->c1 > 0.0 && G1->t1 > 0.0 && G1->r1 > 0.0, "(G1) constants c1, t1, r1 > 0");
        for (int k = 0; k <= samples; ++k) {
            const double t = G1->t1 * k / samples;
            const double bound = G1->c1 * std::pow(t, G1->r1);
            require(g(t) <= bound * (1.0 + 1e-12), "(G1): g(t) <= c1 t^r1 on [0, t1]");
        }
    }
    if (G2) {
        require(G2->c2 > 0.0 && G2->t2 >= 0.0 && G2->r2 > 0.0, "(G2) constants c2 > 0, t2 >= 0, r2 > 0");
        const double top = std::max(100.0 * G2->t2, G2->t2 + 100.0);
        for (int k = 0; k <= samples; ++k) {
            const double t = G2->t2 + (top - G2->t2) * k / samples;
            const double bound = G2->c2 * std::pow(t, G2->r2);
            require(g(t) >= bound * (1.0 - 1e-12), "(G2): g(t) >= c2 t^r2 on [t2, T]");
        }
    }
}

ProblemSpec ProblemSpec::with_lambda(double value) const
{
    ProblemSpec copy = *this;
    copy.lambda = value;
    return copy;
}

GridFunction rhs(const ProblemSpec& spec, const GridFunction& u)
{
    if (!u.same_grid(spec.m))
        throw std::invalid_argument("rhs: state lives on a different grid");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = clamp_state(u[i]);
        out[i] = spec.lambda * spec.m[i] * spec.f(v) + spec.mu * spec.n[i] * spec.g(v);
    }
    return GridFunction(u.grid_ptr(), std::move(out));
}

double rhs_at(const ProblemSpec& spec, double x, double u)
{
    const double v = clamp_state(u);
    return spec.lambda * spec.m(x) * spec.f(v) + spec.mu * spec.n(x) * spec.g(v);
}

double max_on(const Nonlinearity& f, double t, std::size_t samples)
{
    double best = 0.0;
    for (std::size_t k = 0; k < samples; ++k)
        best = std::max(best, f(t * static_cast<double>(k) / static_cast<double>(samples - 1)));
    return best;
}

bool nondecreasing_on(const Nonlinearity& f, double t, std::size_t samples)
{
    double prev = f(0.0);
    for (std::size_t k = 1; k < samples; ++k) {
        const double v = f(t * static_cast<double>(k) / static_cast<double>(samples - 1));
        if (v < prev)
            return false;
        prev = v;
    }
    return true;
}

} // namespace phibvp
