#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phibvp {

/// Odd increasing homeomorphism of the real line.
///
/// The map is described on [0, inf) and extended oddly, so phi(-t) = -phi(t)
/// holds exactly. A closed-form inverse is used when supplied; otherwise the
/// inverse is found by bracket doubling and safeguarded false position. `log_forward(s)` is
/// ln phi(e^s), which lets index computations reach far beyond the range
/// where phi itself is representable; it defaults to ln(phi(exp(s))).
class Homeomorphism {
public:
    using Scalar = std::function<double(double)>;

    struct Parts {
        std::string label;
        Scalar forward;                 // on t >= 0
        Scalar inverse;                 // on y >= 0, optional
        Scalar log_forward;             // s -> ln phi(e^s), optional
        std::optional<double> known_alpha;
        std::optional<double> known_beta;
        std::vector<double> critical_values; // y > 0 where phi^{-1} is not smooth
    };

    explicit Homeomorphism(Parts parts);

    double forward(double t) const;
    double inverse(double y) const;
    double log_forward(double s) const;

    bool has_closed_form_inverse() const { return static_cast<bool>(parts_.inverse); }
    bool has_log_forward() const { return static_cast<bool>(parts_.log_forward); }
    const std::string& label() const { return parts_.label; }
    std::optional<double> known_alpha() const { return parts_.known_alpha; }
    std::optional<double> known_beta() const { return parts_.known_beta; }
    const std::vector<double>& critical_values() const { return parts_.critical_values; }

    /// Forward map on t >= 0 without the odd extension.
    double forward_positive(double t) const { return parts_.forward(t); }

private:
    Parts parts_;
};

/// t with phi(t) = y; the search stops once the bracket is narrower than
/// rel_tol * t. Throws std::overflow_error if the bracket cannot be closed.
double numeric_inverse(const Homeomorphism& phi, double y, double rel_tol = 4e-16);

/// phi(t) = |t|^{r-1} t written as sign(t)|t|^r.
Homeomorphism make_power(double r);

/// Builds one of: power, sum-powers, ratio, xlog, x-log1p, logpow, arcsinh, loglog.
Homeomorphism make_catalog_entry(const std::string& name, const std::vector<double>& params = {});

/// Parses descriptors such as "power:2", "sum-powers:3,1.5", "xlog", "logpow:2".
Homeomorphism parse_phi(const std::string& descriptor);

/// phi^{-1} wrapped as a homeomorphism; its log_forward is obtained by
/// inverting log_forward of phi, so it stays finite far outside double range.
Homeomorphism inverse_of(const Homeomorphism& phi);

/// Descriptors of every shipped catalog entry, with representative parameters.
std::vector<std::string> catalog_descriptors();

} // namespace phibvp
