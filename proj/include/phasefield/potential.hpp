#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace phasefield {

enum class PotentialKind { DoubleWell, Polynomial };

/// Polynomial potential F together with the interval [gamma_minus, gamma_plus]
/// that the maximum principle is expected to keep invariant.
///
/// F is stored by its coefficients in ascending powers; f = F' and f' = F''
/// are derived term by term at construction, so the three are exactly
/// consistent. The double well is the polynomial 1/4 - u^2/2 + u^4/4.
class PotentialSpec {
public:
    static PotentialSpec double_well(double gamma_minus = -1.0, double gamma_plus = 1.0);
    static PotentialSpec polynomial(std::vector<double> coeffs, double gamma_minus,
                                    double gamma_plus);

    PotentialKind kind() const noexcept { return kind_; }
    double gamma_minus() const noexcept { return gamma_minus_; }
    double gamma_plus() const noexcept { return gamma_plus_; }

    /// Coefficients of F, f and f' in ascending powers.
    std::span<const double> coeffs_F() const noexcept { return F_; }
    std::span<const double> coeffs_f() const noexcept { return f_; }
    std::span<const double> coeffs_fprime() const noexcept { return fp_; }

    /// Scale used by the hypothesis tolerances: 1 + max(|gamma_-|, |gamma_+|).
    double bound_scale() const noexcept;

private:
    PotentialSpec(PotentialKind kind, std::vector<double> coeffs, double gamma_minus,
                  double gamma_plus);

    PotentialKind kind_;
    double gamma_minus_;
    double gamma_plus_;
    std::vector<double> F_;
    std::vector<double> f_;
    std::vector<double> fp_;
};

/// Horner evaluation of an ascending-power polynomial.
double horner(std::span<const double> coeffs, double u) noexcept;

/// Term-by-term derivative of an ascending-power polynomial.
std::vector<double> differentiate(std::span<const double> coeffs);

double eval_F(const PotentialSpec& p, double u) noexcept;
double eval_f(const PotentialSpec& p, double u) noexcept;
double eval_fprime(const PotentialSpec& p, double u) noexcept;

struct StabilityBounds {
    double max_fprime;   // max of f' on [gamma_-, gamma_+]
    double lipschitz_L;  // L = -min of f' on [gamma_-, gamma_+]
    double dt_max;       // largest dt with dt * max_fprime <= 1, +inf if max_fprime <= 0
};

/// Exact extrema of f' on the invariant interval. Interior candidates are the
/// real roots of f'' obtained from a companion-matrix eigen-solve.
/// Throws RootFindingFailure if the eigen-solve does not converge.
StabilityBounds stability_bounds(const PotentialSpec& p);

/// Real roots of an ascending-power polynomial lying in [lo, hi].
std::vector<double> real_roots_in(std::span<const double> coeffs, double lo, double hi);

struct ValidationReport {
    bool endpoints_vanish;
    double f_at_gamma_minus;
    double f_at_gamma_plus;

    /// f(0) = 0 with gamma_- < 0 < gamma_+, the extra hypothesis of the L1 estimate.
    bool f_vanishes_at_zero;
    double f_at_zero;
    bool zero_strictly_inside;

    double tolerance;
};

ValidationReport validate_hypotheses(const PotentialSpec& p);

std::string to_string(PotentialKind kind);

}  // namespace phasefield
