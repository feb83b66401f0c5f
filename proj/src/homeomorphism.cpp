#include "phibvp/homeomorphism.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>
#include <stdexcept>

namespace phibvp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 + e^s) without overflow or underflow
double softplus(double s)
{
    if (s > 0.0)
        return s + std::log1p(std::exp(-s));
    return std::log1p(std::exp(s));
}

// ln softplus(s), accurate for very negative s
double log_softplus(double s)
{
    if (s < -30.0)
        return s + std::log1p(-0.5 * std::exp(s));
    return std::log(softplus(s));
}

double log_add_exp(double x, double y)
{
    const double hi = std::max(x, y), lo = std::min(x, y);
    return hi + std::log1p(std::exp(lo - hi));
}

// x - ln(1 + x) for x >= 0, with the series where cancellation would bite
double x_minus_log1p(double x)
{
    if (x < 0.1) {
        double term = x * x, sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double add = term / k;
            sum += (k % 2 == 0) ? add : -add;
            if (add < 1e-18 * sum)
                break;
            term *= x;
        }
        return sum;
    }
    return x - std::log1p(x);
}

double log_x_minus_log1p(double s)
{
    if (s < -3.0) {
        // (x - ln(1+x)) / x^2 = 1/2 - x/3 + x^2/4 - ...
        const double x = std::exp(s);
        double term = 1.0, ratio = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double add = term / k;
            ratio += (k % 2 == 0) ? add : -add;
            if (add < 1e-18 * ratio)
                break;
            term *= x;
        }
        return 2.0 * s + std::log(ratio);
    }
    if (s > 700.0)
        return s + std::log1p(-(s + std::log1p(std::exp(-s))) * std::exp(-s));
    return std::log(x_minus_log1p(std::exp(s)));
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument("invalid phi parameters: " + what);
}

std::string tag(const std::string& name, const std::vector<double>& params)
{
    std::ostringstream os;
    os << name;
    for (std::size_t i = 0; i < params.size(); ++i)
        os << (i == 0 ? ":" : ",") << params[i];
    return os.str();
}

} // namespace

Homeomorphism::Homeomorphism(Parts parts) : parts_(std::move(parts))
{
    if (!parts_.forward)
        throw std::invalid_argument("homeomorphism needs a forward map");
}

double Homeomorphism::forward(double t) const
{
    if (t < 0.0)
        return -parts_.forward(-t);
    return parts_.forward(t);
}

double Homeomorphism::inverse(double y) const
{
    if (y == 0.0)
        return 0.0;
    if (parts_.inverse)
        return y < 0.0 ? -parts_.inverse(-y) : parts_.inverse(y);
    return numeric_inverse(*this, y);
}

double Homeomorphism::log_forward(double s) const
{
    if (parts_.log_forward)
        return parts_.log_forward(s);
    return std::log(parts_.forward(std::exp(s)));
}

namespace {

// Illinois false position on an increasing F with F(lo) < 0 < F(hi), plus a
// bisection step whenever the bracket fails to halve. Returns the final
// bracket; stops once done(lo, hi) holds or a root is hit exactly.
template <typename F, typename Done>
std::pair<double, double> illinois(const F& f, double lo, double hi, double f_lo, double f_hi, const Done& done)
{
    int side = 0;
    while (!done(lo, hi)) {
        const double width = hi - lo;
        double x = (f_hi - f_lo) > 0.0 ? lo - f_lo * width / (f_hi - f_lo) : 0.5 * (lo + hi);
        if (!(x > lo && x < hi))
            x = 0.5 * (lo + hi);
        if (x <= lo || x >= hi)
            break;
        const double fx = f(x);
        if (fx == 0.0)
            return {x, x};
        if (fx < 0.0) {
            lo = x;
            f_lo = fx;
            if (side == -1)
                f_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if (side == 1)
                f_lo *= 0.5;
            side = 1;
        }
        if (hi - lo > 0.5 * width) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            const double fm = f(mid);
            if (fm == 0.0)
                return {mid, mid};
            if (fm < 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
                f_hi = fm;
            }
            side = 0;
        }
    }
    return {lo, hi};
}

} // namespace

double numeric_inverse(const Homeomorphism& phi, double y, double rel_tol)
{
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("numeric_inverse: tolerance must be positive");
    if (y == 0.0)
        return 0.0;
    if (y < 0.0)
        return -numeric_inverse(phi, -y, rel_tol);
    if (!std::isfinite(y))
        throw std::overflow_error("numeric_inverse: non-finite input");

    // coarse stage in u = ln t, where ln phi(e^u) is close to linear:
    // galloping bracket, then false position down to a relative width of 1e-6
    const double ly = std::log(y);
    const auto g = [&](double u) { return std::log(phi.forward_positive(std::exp(u))) - ly; };
    const double kMaxU = std::log(1e300);
    double lo = 0.0, hi = 0.0;
    double g_lo = g(0.0), g_hi = g_lo;
    if (g_lo == 0.0)
        return 1.0;
    double step = 1.0;
    if (g_lo < 0.0) {
        for (;;) {
            hi = lo + step;
            if (hi > kMaxU) {
                hi = kMaxU;
                g_hi = g(hi);
                if (!(g_hi >= 0.0))
                    throw std::overflow_error("numeric_inverse: input beyond the range of phi");
                break;
            }
            g_hi = g(hi);
            if (g_hi >= 0.0)
                break;
            lo = hi;
            g_lo = g_hi;
            step *= 2.0;
        }
    } else {
        for (;;) {
            lo = hi - step;
            if (lo < -kMaxU)
                return std::exp(-kMaxU);
            g_lo = g(lo);
            if (g_lo < 0.0)
                break;
            hi = lo;
            g_hi = g_lo;
            step *= 2.0;
        }
    }
    if (g_hi == 0.0)
        return std::exp(hi);
    std::tie(lo, hi) = illinois(g, lo, hi, g_lo, g_hi, [](double l, double h) { return h - l <= 1e-6; });
    if (lo == hi)
        return std::exp(lo);

    // fine stage in t itself
    const auto f = [&](double t) { return phi.forward_positive(t) - y; };
    double t_lo = std::exp(lo), t_hi = std::exp(hi);
    double f_lo = f(t_lo), f_hi = f(t_hi);
    // rounding in exp can leave the bracket a hair too narrow
    while (f_lo > 0.0) {
        t_lo *= 1.0 - 1e-6;
        f_lo = f(t_lo);
    }
    while (f_hi < 0.0) {
        t_hi *= 1.0 + 1e-6;
        f_hi = f(t_hi);
    }
    if (f_lo == 0.0)
        return t_lo;
    if (f_hi == 0.0)
        return t_hi;
    std::tie(t_lo, t_hi) =
        illinois(f, t_lo, t_hi, f_lo, f_hi, [rel_tol](double l, double h) { return h - l <= rel_tol * h; });
    return 0.5 * (t_lo + t_hi);
}

Homeomorphism make_power(double r)
{
    require(r > 0.0 && std::isfinite(r), "power exponent r > 0");
    Homeomorphism::Parts p;
    p.label = tag("power", {r});
    if (r == 1.0) {
        p.forward = [](double t) { return t; };
        p.inverse = [](double y) { return y; };
    } else {
        p.forward = [r](double t) { return std::pow(t, r); };
        p.inverse = [r](double y) { return std::pow(y, 1.0 / r); };
    }
    p.log_forward = [r](double s) { return r * s; };
    p.known_alpha = r;
    p.known_beta = r;
    return Homeomorphism(std::move(p));
}

Homeomorphism make_catalog_entry(const std::string& name, const std::vector<double>& params)
{
    auto want = [&](std::size_t n) {
        require(params.size() == n, name + " takes " + std::to_string(n) + " parameter(s)");
    };
    Homeomorphism::Parts p;
    p.label = tag(name, params);

    if (name == "power") {
        want(1);
        return make_power(params[0]);
    }
    if (name == "sum-powers") {
        // x^{p1} + x^{p2}
        want(2);
        const double p1 = params[0], p2 = params[1];
        require(p1 >= p2 && p2 > 0.0, "sum-powers needs p1 >= p2 > 0");
        p.forward = [p1, p2](double x) { return std::pow(x, p1) + std::pow(x, p2); };
        p.log_forward = [p1, p2](double s) { return log_add_exp(p1 * s, p2 * s); };
        p.known_alpha = p2;
        p.known_beta = p1;
    } else if (name == "ratio") {
        // x^{p1} / (1 + x^{p2})
        want(2);
        const double p1 = params[0], p2 = params[1];
        require(p1 > p2 && p2 > 0.0, "ratio needs p1 > p2 > 0");
        p.forward = [p1, p2](double x) {
            if (x <= 1.0)
                return std::pow(x, p1) / (1.0 + std::pow(x, p2));
            return std::pow(x, p1 - p2) / (std::pow(x, -p2) + 1.0);
        };
        p.log_forward = [p1, p2](double s) { return p1 * s - softplus(p2 * s); };
        p.known_alpha = p1 - p2;
        p.known_beta = p1;
    } else if (name == "xlog") {
        // x (|ln x| + 1), continued by 0 at the origin
        want(0);
        p.forward = [](double x) { return x > 0.0 ? x * (std::abs(std::log(x)) + 1.0) : 0.0; };
        p.log_forward = [](double s) { return s + std::log1p(std::abs(s)); };
        p.known_alpha = 1.0;
        p.critical_values = {1.0}; // phi'(1) = 0
    } else if (name == "x-log1p") {
        // x - ln(x + 1)
        want(0);
        p.forward = x_minus_log1p;
        p.log_forward = log_x_minus_log1p;
        p.known_alpha = 1.0;
    } else if (name == "logpow") {
        // (ln(x + 1))^p
        want(1);
        const double e = params[0];
        require(e > 0.0, "logpow needs p > 0");
        p.forward = [e](double x) { return std::pow(std::log1p(x), e); };
        p.inverse = [e](double y) { return std::expm1(std::pow(y, 1.0 / e)); };
        p.log_forward = [e](double s) { return e * log_softplus(s); };
        p.known_alpha = 0.0;
        p.known_beta = e;
    } else if (name == "arcsinh") {
        want(0);
        p.forward = [](double x) { return std::asinh(x); };
        p.inverse = [](double y) { return std::sinh(y); };
        p.log_forward = [](double s) {
            if (s > 20.0)
                return std::log(s + std::log(2.0) + 0.25 * std::exp(-2.0 * s));
            if (s < -20.0)
                return s + std::log1p(-std::exp(2.0 * s) / 6.0);
            return std::log(std::asinh(std::exp(s)));
        };
        p.known_alpha = 0.0;
    } else if (name == "loglog") {
        // ln(ln(x + 1) + 1)
        want(0);
        p.forward = [](double x) { return std::log1p(std::log1p(x)); };
        p.inverse = [](double y) { return std::expm1(std::expm1(y)); };
        p.log_forward = [](double s) {
            if (s < -30.0)
                return s - std::exp(s);
            return std::log(std::log1p(softplus(s)));
        };
        p.known_alpha = 0.0;
    } else {
        throw std::invalid_argument("unknown phi catalog entry '" + name + "'");
    }
    return Homeomorphism(std::move(p));
}

Homeomorphism parse_phi(const std::string& descriptor)
{
    const auto colon = descriptor.find(':');
    const std::string name = descriptor.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(descriptor.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                params.push_back(std::stod(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad phi parameter '" + item + "' in '" + descriptor + "'");
            }
        }
    }
    return make_catalog_entry(name, params);
}

Homeomorphism inverse_of(const Homeomorphism& phi)
{
    Homeomorphism::Parts p;
    p.label = "inverse(" + phi.label() + ")";
    p.forward = [phi](double y) { return phi.inverse(y); };
    p.inverse = [phi](double t) { return phi.forward(t); };
    p.log_forward = [phi](double sigma) {
        // solve log_forward(s) = sigma; log_forward is increasing
        auto L = [&phi](double s) { return phi.log_forward(s); };
        double lo = -1.0, hi = 1.0, step = 2.0;
        while (L(hi) < sigma) {
            lo = hi;
            hi += step;
            step *= 2.0;
            if (!std::isfinite(hi))
                return kInf;
        }
        step = 2.0;
        while (L(lo) > sigma) {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if (!std::isfinite(lo))
                return -kInf;
        }
        if (std::isnan(L(lo)) || std::isnan(L(hi)))
            return std::nan("");
        for (int it = 0; it < 2000; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (L(mid) < sigma)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    if (auto b = phi.known_beta())
        p.known_alpha = *b > 0.0 ? 1.0 / *b : kInf;
    if (auto a = phi.known_alpha())
        p.known_beta = *a > 0.0 ? 1.0 / *a : kInf;
    return Homeomorphism(std::move(p));
}

std::vector<std::string> catalog_descriptors()
{
    return {"power:0.5", "power:1", "power:2", "power:3", "sum-powers:3,1.5", "ratio:2,0.5",
            "xlog", "x-log1p", "logpow:2", "arcsinh", "loglog"};
}

} // namespace phibvp
