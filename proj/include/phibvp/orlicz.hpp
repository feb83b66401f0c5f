#pragma once

#include "phibvp/homeomorphism.hpp"

#include <span>
#include <string>
#include <vector>

namespace phibvp {

/// Log-spaced x grid over [1e-8, 1e8] with 10^4 points.
std::vector<double> default_x_grid();

/// max over x_grid of phi(t x) / phi(x), evaluated through log_forward.
/// Throws std::invalid_argument for t <= 0 and std::domain_error if phi vanishes on the grid.
double M_of(const Homeomorphism& phi, double t, std::span<const double> x_grid);

struct IndexEstimate {
    double alpha_hat = 0.0;
    double beta_hat = 0.0; // +inf when the large-t slopes diverge
    double t_small_lo = 0.0, t_small_hi = 0.0;
    double t_large_lo = 0.0, t_large_hi = 0.0;
    double fit_residual = 0.0; // RMS residual of the two fits

    bool beta_infinite() const;
};

/// Slopes of ln M(t) against ln t over t = 2^{-k} and t = 2^k, k = 12..30.
/// M is computed on a dyadic log grid spanning x in [e^-700, e^700]; the fit
/// carries an extra ln(1 + |ln t|) term so logarithmic factors do not bias the slope.
IndexEstimate estimate_indices(const Homeomorphism& phi);

struct Delta2Result {
    bool holds = false;
    double k_hat = 0.0;          // sup phi(2x) / phi(x) on the base grid
    double k_hat_extended = 0.0; // same on a grid ten times wider at both ends
};

Delta2Result check_delta2(const Homeomorphism& phi, double x_lo = 1e-8, double x_hi = 1e8,
                          std::size_t count = 10000);

struct PhiConditionResult {
    bool phi_cond = false;       // (Phi): both bounds with homeomorphisms
    bool phi_prime_cond = false; // (Phi'): lower homeomorphism, any finite upper majorant
    double p = 0.0;
    double q = 0.0;
    double C = 0.0; // least constant on the sampled grid, inf if none
    std::string psi1;
    std::string psi2;
};

/// C^{-1} min{t^p, t^q} phi(x) <= phi(t x) <= C max{t^p, t^q} phi(x) with
/// p = alpha_hat - 0.05, q = beta_hat + 0.05 on x in [1e-8, 1e8], t = 2^k, |k| <= 30.
/// Holds when C <= 1e6.
PhiConditionResult check_phi_conditions(const Homeomorphism& phi, const IndexEstimate& est);
PhiConditionResult check_phi_conditions(const Homeomorphism& phi);

enum class LimitEnd { ZeroPlus, Infinity };
enum class LimitClass { Zero, Infinite, FinitePositive, Indeterminate };

std::string to_string(LimitEnd end);
std::string to_string(LimitClass c);

/// Behaviour of t^q / phi(t) along t = 2^{-k} (zero_plus) or 2^k (infinity), k = 8..40.
LimitClass classify_limit(const Homeomorphism& phi, double q, LimitEnd end);

struct DualityResult {
    bool ok = false;
    IndexEstimate phi;
    IndexEstimate inverse;
    double beta_residual = 0.0;  // |beta_phi - 1/alpha_inv|, 0 when both infinite
    double alpha_residual = 0.0; // |alpha_phi - 1/beta_inv|
};

/// beta_phi = 1/alpha_{phi^-1} and alpha_phi = 1/beta_{phi^-1} within 0.05, with 1/0 = inf.
DualityResult duality_check(const Homeomorphism& phi);

enum class IndexVerdict { HoldsByCorollary, UndecidedCheckLimits };
enum class Verdict { Holds, Fails, Undecided };

std::string to_string(IndexVerdict v);
std::string to_string(Verdict v);

struct HypothesisReport {
    std::string name;   // "F", "G1", "G2"
    double exponent = 0.0;
    LimitEnd end = LimitEnd::ZeroPlus;
    IndexVerdict index_verdict = IndexVerdict::UndecidedCheckLimits;
    LimitClass limit = LimitClass::Indeterminate;
    Verdict verdict = Verdict::Undecided;
};

struct AdvisorReport {
    IndexEstimate indices;
    std::vector<HypothesisReport> items;
};

/// Limit parts of (F), (G1), (G2): t^q/phi -> inf at 0, t^{r1}/phi -> 0 at 0,
/// t^{r2}/phi -> inf at inf. Index-based verdicts need exponents clear of the
/// estimated indices by 0.1; otherwise the numerical limit decides.
AdvisorReport hypothesis_advisor(const Homeomorphism& phi, double q, double r1, double r2);

} // namespace phibvp
