#include "inverse_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace phibvp::detail {

namespace {

constexpr std::array<double, 4> kGl4x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                         0.8611363115940526};
constexpr std::array<double, 4> kGl4w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374538};
constexpr int kGradeLevels = 8;
constexpr std::size_t kMaxCritical = 4;
constexpr std::size_t kMaxRoots = 2 + 4 * kMaxCritical;

// c - H on a cell, as a polynomial in the local coordinate tau
struct CellPoly {
    double A; // coefficient of tau^2
    double B;
    double C;

    double operator()(double tau) const { return (A * tau + B) * tau + C; }
};

template <typename F, std::size_t N>
double gauss(const F& f, double p, double q, const std::array<double, N>& xs, const std::array<double, N>& ws)
{
    const double half = 0.5 * (q - p), mid = 0.5 * (p + q);
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k)
        s += ws[k] * f(mid + half * xs[k]);
    return half * s;
}

// integral over [p, q] with geometric grading toward p (toward_left) or q
template <typename F>
double graded(const F& f, double p, double q, bool toward_left)
{
    const double len = q - p;
    double sum = 0.0;
    double inner = 0.0;
    for (int k = kGradeLevels; k >= 0; --k) {
        const double outer = (k == 0) ? len : std::ldexp(len, -k);
        const double lo = toward_left ? p + inner : q - outer;
        const double hi = toward_left ? p + outer : q - inner;
        sum += gauss(f, lo, hi, kGl4x, kGl4w);
        inner = outer;
    }
    return sum;
}

int real_roots(const CellPoly& P, double roots[2])
{
    const double A = -P.A, B = -P.B, C = -P.C; // A tau^2 + B tau + C = 0 has the same roots
    const double scale = std::abs(B) + std::abs(C);
    if (std::abs(A) <= 1e-300 || (scale > 0.0 && std::abs(A) < 1e-18 * scale)) {
        if (B == 0.0)
            return 0;
        roots[0] = -C / B;
        return 1;
    }
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0)
        return 0;
    const double qd = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    int n = 0;
    roots[n++] = qd / A;
    if (qd != 0.0)
        roots[n++] = C / qd;
    if (n == 2 && roots[0] > roots[1])
        std::swap(roots[0], roots[1]);
    return n;
}

} // namespace

InverseIntegrator::InverseIntegrator(const Homeomorphism& phi, const GridFunction& h, const GridFunction& H)
    : phi_(phi), h_(h), H_(H)
{
    if (phi.critical_values().size() > kMaxCritical)
        throw std::invalid_argument("InverseIntegrator: too many critical values");
}

double InverseIntegrator::H_at(double x) const
{
    return antiderivative_at(h_, H_, x);
}

Sums InverseIntegrator::cell(std::size_t i, double c, double scale) const
{
    return cell_part(i, 0.0, h_.grid().width(i), c, scale);
}

Sums InverseIntegrator::cell_part(std::size_t i, double tau0, double tau1, double c, double scale) const
{
    Sums out;
    if (!(tau1 > tau0))
        return out;
    const double w = h_.grid().width(i);
    const CellPoly P{-0.5 * (h_[i + 1] - h_[i]) / w, -h_[i], c - H_[i]};
    const auto f = [&](double tau) { return phi_.inverse(scale * P(tau)); };

    // singular points: zeros of P, and levels where scale * P hits a critical value of phi^{-1}
    std::array<double, kMaxRoots> roots;
    std::size_t nr = 0;
    auto add_level = [&](double level) {
        nr += static_cast<std::size_t>(real_roots(CellPoly{P.A, P.B, P.C - level}, roots.data() + nr));
    };
    add_level(0.0);
    if (scale > 0.0) {
        for (double y : phi_.critical_values()) {
            add_level(y / scale);
            add_level(-y / scale);
        }
    }

    // breakpoints: interval ends plus interior singular points
    std::array<double, kMaxRoots + 2> bp;
    std::size_t nb = 0;
    bp[nb++] = tau0;
    for (std::size_t k = 0; k < nr; ++k) {
        if (roots[k] > tau0 && roots[k] < tau1)
            bp[nb++] = roots[k];
    }
    std::sort(bp.begin() + 1, bp.begin() + static_cast<std::ptrdiff_t>(nb));
    bp[nb++] = tau1;

    auto near_root = [&](double at, double reach) {
        for (std::size_t k = 0; k < nr; ++k) {
            if (std::abs(roots[k] - at) <= reach)
                return true;
        }
        return false;
    };

    for (std::size_t k = 0; k + 1 < nb; ++k) {
        const double p = bp[k], q = bp[k + 1];
        const double len = q - p;
        const bool left = near_root(p, len);
        const bool right = near_root(q, len);
        double piece;
        if (left && right) {
            const double m = 0.5 * (p + q);
            piece = graded(f, p, m, true) + graded(f, m, q, false);
        } else if (left) {
            piece = graded(f, p, q, true);
        } else if (right) {
            piece = graded(f, p, q, false);
        } else {
            piece = gauss(f, p, q, kGl4x, kGl4w);
        }
        out.value += piece;
        out.magnitude += std::abs(piece);
    }
    return out;
}

Sums InverseIntegrator::range(double x0, double x1, double c, double scale) const
{
    Sums out;
    if (!(x1 > x0))
        return out;
    const Grid& g = h_.grid();
    const std::size_t i0 = g.cell_of(x0);
    const std::size_t i1 = g.cell_of(x1);
    for (std::size_t i = i0; i <= i1; ++i) {
        const double lo = std::max(x0, g[i]) - g[i];
        const double hi = std::min(x1, g[i + 1]) - g[i];
        out += cell_part(i, lo, hi, c, scale);
    }
    return out;
}

} // namespace phibvp::detail
