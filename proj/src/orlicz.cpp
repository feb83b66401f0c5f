#include "phibvp/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace phibvp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
constexpr int kPerOctave = 8;
constexpr double kLogSpan = 700.0;
constexpr double kMargin = 0.05;
constexpr double kBand = 0.1;

// L(s) = ln phi(e^s) on s = s0 + j ln2 / 8
struct LogTable {
    double s0 = 0.0;
    std::vector<double> L;

    LogTable(const Homeomorphism& phi, double lo, double hi)
    {
        const double ds = kLn2 / kPerOctave;
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / ds)) + 1;
        s0 = lo;
        L.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            L[j] = phi.log_forward(lo + static_cast<double>(j) * ds);
    }

    // ln M(2^k) restricted to pairs inside the table
    double log_M(int k) const
    {
        const long shift = static_cast<long>(k) * kPerOctave;
        const long n = static_cast<long>(L.size());
        double best = -kInf;
        for (long i = std::max(0L, -shift); i < n && i + shift < n; ++i) {
            const double d = L[i + shift] - L[i];
            if (!std::isnan(d))
                best = std::max(best, d);
        }
        return best;
    }
};

// least squares y = a x + b z + c; returns a and the RMS residual
std::pair<double, double> fit_with_log(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double A[3][3] = {}, r[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {x[i], std::log1p(std::abs(x[i])), 1.0};
        for (int a = 0; a < 3; ++a) {
            r[a] += row[a] * y[i];
            for (int b = 0; b < 3; ++b)
                A[a][b] += row[a] * row[b];
        }
    }
    // Gaussian elimination with partial pivoting
    int perm[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int i = c + 1; i < 3; ++i)
            if (std::abs(A[perm[i]][c]) > std::abs(A[perm[piv]][c]))
                piv = i;
        std::swap(perm[c], perm[piv]);
        for (int i = c + 1; i < 3; ++i) {
            const double f = A[perm[i]][c] / A[perm[c]][c];
            for (int b = c; b < 3; ++b)
                A[perm[i]][b] -= f * A[perm[c]][b];
            r[perm[i]] -= f * r[perm[c]];
        }
    }
    double coef[3];
    for (int c = 2; c >= 0; --c) {
        double s = r[perm[c]];
        for (int b = c + 1; b < 3; ++b)
            s -= A[perm[c]][b] * coef[b];
        coef[c] = s / A[perm[c]][c];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (coef[0] * x[i] + coef[1] * std::log1p(std::abs(x[i])) + coef[2]);
        ss += e * e;
    }
    return {coef[0], std::sqrt(ss / static_cast<double>(n))};
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double reciprocal(double x)
{
    if (std::isinf(x))
        return 0.0;
    return x < kMargin ? kInf : 1.0 / x;
}

double gap(double a, double b)
{
    if (std::isinf(a) && std::isinf(b))
        return 0.0;
    if (std::isinf(a) || std::isinf(b))
        return kInf;
    return std::abs(a - b);
}

} // namespace

std::vector<double> default_x_grid()
{
    std::vector<double> out(10000);
    const double lo = std::log(1e-8), hi = std::log(1e8);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(out.size() - 1));
    return out;
}

double M_of(const Homeomorphism& phi, double t, std::span<const double> x_grid)
{
    if (!(t > 0.0))
        throw std::invalid_argument("M(t, phi) needs t > 0");
    if (x_grid.empty())
        throw std::invalid_argument("M(t, phi) needs a nonempty x grid");
    const double lt = std::log(t);
    double best = -kInf;
    for (double x : x_grid) {
        if (!(x > 0.0))
            throw std::invalid_argument("M(t, phi) needs a positive x grid");
        const double lx = std::log(x);
        const double den = phi.log_forward(lx);
        if (den == -kInf)
            throw std::domain_error("phi vanishes at a positive x");
        const double d = phi.log_forward(lx + lt) - den;
        if (!std::isnan(d))
            best = std::max(best, d);
    }
    return std::exp(best);
}

bool IndexEstimate::beta_infinite() const
{
    return std::isinf(beta_hat);
}

IndexEstimate estimate_indices(const Homeomorphism& phi)
{
    const LogTable table(phi, -kLogSpan, kLogSpan);
    constexpr int k_lo = 12, k_hi = 30;
    std::vector<double> lt_small, lm_small, lt_large, lm_large;
    for (int k = k_lo; k <= k_hi; ++k) {
        lt_small.push_back(-k * kLn2);
        lm_small.push_back(table.log_M(-k));
        lt_large.push_back(k * kLn2);
        lm_large.push_back(table.log_M(k));
    }

    IndexEstimate est;
    est.t_small_lo = std::ldexp(1.0, -k_hi);
    est.t_small_hi = std::ldexp(1.0, -k_lo);
    est.t_large_lo = std::ldexp(1.0, k_lo);
    est.t_large_hi = std::ldexp(1.0, k_hi);

    double res_small = 0.0, res_large = 0.0;
    if (std::all_of(lm_small.begin(), lm_small.end(), [](double v) { return std::isfinite(v); })) {
        auto [a, r] = fit_with_log(lt_small, lm_small);
        est.alpha_hat = std::max(0.0, a);
        res_small = r;
    } else {
        est.alpha_hat = 0.0;
    }

    bool diverges = false;
    std::vector<double> local;
    for (std::size_t i = 0; i + 1 < lm_large.size(); ++i) {
        const double s = (lm_large[i + 1] - lm_large[i]) / kLn2;
        if (!std::isfinite(s) || s > 1e3)
            diverges = true;
        local.push_back(s);
    }
    if (!diverges && local.back() - local.front() > 0.5)
        diverges = true;
    if (diverges) {
        est.beta_hat = kInf;
    } else {
        auto [b, r] = fit_with_log(lt_large, lm_large);
        est.beta_hat = std::max(b, est.alpha_hat);
        res_large = r;
    }
    est.fit_residual = std::sqrt(0.5 * (res_small * res_small + res_large * res_large));
    return est;
}

Delta2Result check_delta2(const Homeomorphism& phi, double x_lo, double x_hi, std::size_t count)
{
    if (!(x_lo > 0.0) || !(x_hi > x_lo) || count < 2)
        throw std::invalid_argument("Delta2 check needs 0 < x_lo < x_hi and at least two points");
    auto sup_ratio = [&phi](double lo, double hi, std::size_t n) {
        const double a = std::log(lo), b = std::log(hi);
        double best = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
            const double d = phi.log_forward(s + kLn2) - phi.log_forward(s);
            if (std::isnan(d))
                return kInf;
            best = std::max(best, d);
        }
        return std::exp(best);
    };
    Delta2Result out;
    out.k_hat = sup_ratio(x_lo, x_hi, count);
    // same density on [x_lo / 10, x_hi * 10]
    const double span = std::log(x_hi / x_lo);
    const auto extra = static_cast<std::size_t>(
        std::ceil(2.0 * std::log(10.0) / span * static_cast<double>(count - 1)));
    out.k_hat_extended = sup_ratio(x_lo / 10.0, x_hi * 10.0, count + extra);
    out.holds = std::isfinite(out.k_hat) && std::isfinite(out.k_hat_extended) && out.k_hat_extended < 2.0 * out.k_hat;
    return out;
}

PhiConditionResult check_phi_conditions(const Homeomorphism& phi, const IndexEstimate& est)
{
    PhiConditionResult out;
    out.p = est.alpha_hat - kMargin;
    out.q = est.beta_hat + kMargin;
    out.C = kInf;
    if (!(out.p > 0.0) || est.beta_infinite()) {
        out.psi1 = out.p > 0.0 ? "C^-1 min{t^p, t^q}" : "none (alpha_hat ~ 0)";
        out.psi2 = "none (beta unbounded)";
        if (!est.beta_infinite())
            out.psi2 = "C max{t^p, t^q}";
        return out;
    }

    // x in [1e-8, 1e8] at 8 points per octave, t = 2^k
    const double lo = std::log(1e-8), hi = std::log(1e8);
    const LogTable table(phi, lo - 30 * kLn2, hi + 30 * kLn2);
    const long base0 = 30 * kPerOctave;
    const long base_n = static_cast<long>(std::floor((hi - lo) / (kLn2 / kPerOctave))) + 1;
    double log_c_lower = 0.0, log_c_upper = 0.0;
    bool majorant_finite = true;
    for (int k = -30; k <= 30; ++k) {
        const double lt = k * kLn2;
        const double lmin = std::min(out.p * lt, out.q * lt);
        const double lmax = std::max(out.p * lt, out.q * lt);
        for (long i = base0; i < base0 + base_n; ++i) {
            const double d = table.L[i + static_cast<long>(k) * kPerOctave] - table.L[i];
            if (!std::isfinite(d)) {
                majorant_finite = false;
                log_c_lower = kInf;
                log_c_upper = kInf;
                continue;
            }
            log_c_lower = std::max(log_c_lower, lmin - d);
            log_c_upper = std::max(log_c_upper, d - lmax);
        }
    }
    const double limit = std::log(1e6);
    out.C = std::exp(std::max(log_c_lower, log_c_upper));
    out.phi_cond = std::max(log_c_lower, log_c_upper) <= limit;
    out.phi_prime_cond = log_c_lower <= limit && majorant_finite;
    out.psi1 = "C^-1 min{t^p, t^q}";
    out.psi2 = "C max{t^p, t^q}";
    return out;
}

PhiConditionResult check_phi_conditions(const Homeomorphism& phi)
{
    return check_phi_conditions(phi, estimate_indices(phi));
}

std::string to_string(LimitEnd end)
{
    return end == LimitEnd::ZeroPlus ? "zero_plus" : "infinity";
}

std::string to_string(LimitClass c)
{
    switch (c) {
    case LimitClass::Zero:
        return "ZERO";
    case LimitClass::Infinite:
        return "INFINITE";
    case LimitClass::FinitePositive:
        return "FINITE_POSITIVE";
    case LimitClass::Indeterminate:
        break;
    }
    return "INDETERMINATE";
}

LimitClass classify_limit(const Homeomorphism& phi, double q, LimitEnd end)
{
    if (!(q > 0.0))
        throw std::invalid_argument("classify_limit needs q > 0");
    const double sign = end == LimitEnd::ZeroPlus ? -1.0 : 1.0;
    std::vector<double> ks, lr;
    for (int k = 8; k <= 40; ++k) {
        const double s = sign * k * kLn2;
        ks.push_back(k);
        lr.push_back(q * s - phi.log_forward(s));
    }
    const double last = lr.back();
    if (std::isnan(last))
        return LimitClass::Indeterminate;
    if (last < std::log(1e-6))
        return LimitClass::Zero;
    if (last > std::log(1e6))
        return LimitClass::Infinite;
    const std::vector<double> tk(ks.end() - 12, ks.end()), tr(lr.end() - 12, lr.end());
    const double sl = slope(tk, tr);
    if (sl < -0.05)
        return LimitClass::Zero;
    if (sl > 0.05)
        return LimitClass::Infinite;
    const auto [mn, mx] = std::minmax_element(tr.begin(), tr.end());
    if (*mx - *mn <= std::log(1.1))
        return LimitClass::FinitePositive;
    return LimitClass::Indeterminate;
}

DualityResult duality_check(const Homeomorphism& phi)
{
    DualityResult out;
    out.phi = estimate_indices(phi);
    out.inverse = estimate_indices(inverse_of(phi));
    out.beta_residual = gap(out.phi.beta_hat, reciprocal(out.inverse.alpha_hat));
    out.alpha_residual = gap(out.phi.alpha_hat, reciprocal(out.inverse.beta_hat));
    out.ok = out.beta_residual <= kMargin && out.alpha_residual <= kMargin;
    return out;
}

std::string to_string(IndexVerdict v)
{
    return v == IndexVerdict::HoldsByCorollary ? "HOLDS_BY_COROLLARY" : "UNDECIDED_CHECK_LIMITS";
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Holds:
        return "HOLDS";
    case Verdict::Fails:
        return "FAILS";
    case Verdict::Undecided:
        break;
    }
    return "UNDECIDED";
}

AdvisorReport hypothesis_advisor(const Homeomorphism& phi, double q, double r1, double r2)
{
    if (!(q > 0.0) || !(r1 > 0.0) || !(r2 > 0.0))
        throw std::invalid_argument("hypothesis_advisor needs positive exponents");
    AdvisorReport report;
    report.indices = estimate_indices(phi);
    const IndexEstimate& est = report.indices;
    const bool alpha_positive = est.alpha_hat >= kMargin;
    const bool beta_finite = !est.beta_infinite();

    auto decide = [&phi](HypothesisReport& h, LimitClass wanted) {
        h.limit = classify_limit(phi, h.exponent, h.end);
        if (h.index_verdict == IndexVerdict::HoldsByCorollary) {
            h.verdict = Verdict::Holds;
            return;
        }
        if (h.limit == LimitClass::Indeterminate)
            h.verdict = Verdict::Undecided;
        else
            h.verdict = h.limit == wanted ? Verdict::Holds : Verdict::Fails;
    };

    HypothesisReport F{"F", q, LimitEnd::ZeroPlus};
    if (alpha_positive && q < est.alpha_hat - kBand)
        F.index_verdict = IndexVerdict::HoldsByCorollary;
    decide(F, LimitClass::Infinite);

    HypothesisReport G1{"G1", r1, LimitEnd::ZeroPlus};
    if (beta_finite && r1 > est.beta_hat + kBand)
        G1.index_verdict = IndexVerdict::HoldsByCorollary;
    decide(G1, LimitClass::Zero);

    HypothesisReport G2{"G2", r2, LimitEnd::Infinity};
    if (beta_finite && r2 > est.beta_hat + kBand)
        G2.index_verdict = IndexVerdict::HoldsByCorollary;
    decide(G2, LimitClass::Infinite);

    report.items = {F, G1, G2};
    return report;
}

} // namespace phibvp
