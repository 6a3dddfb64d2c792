#include "phasefield/potential.hpp"

#include "phasefield/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phasefield {

namespace {

constexpr double kHypothesisTol = 1e-12;

std::vector<double> trimmed(std::span<const double> coeffs)
{
    std::vector<double> out(coeffs.begin(), coeffs.end());
    while (!out.empty() && out.back() == 0.0) {
        out.pop_back();
    }
    return out;
}

}  // namespace

double horner(std::span<const double> coeffs, double u) noexcept
{
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * u + *it;
    }
    return acc;
}

std::vector<double> differentiate(std::span<const double> coeffs)
{
    if (coeffs.size() <= 1) {
        return {0.0};
    }
    std::vector<double> out(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        out[k - 1] = static_cast<double>(k) * coeffs[k];
    }
    return out;
}

PotentialSpec::PotentialSpec(PotentialKind kind, std::vector<double> coeffs,
                             double gamma_minus, double gamma_plus)
    : kind_(kind), gamma_minus_(gamma_minus), gamma_plus_(gamma_plus), F_(std::move(coeffs))
{
    if (!std::isfinite(gamma_minus) || !std::isfinite(gamma_plus) || !(gamma_minus < gamma_plus)) {
        std::ostringstream msg;
        msg << "invariant interval must satisfy gamma_minus < gamma_plus, got [" << gamma_minus
            << ", " << gamma_plus << "]";
        throw InvalidPotential(msg.str());
    }
    if (F_.empty()) {
        throw InvalidPotential("polynomial potential needs at least one coefficient");
    }
    for (double c : F_) {
        if (!std::isfinite(c)) {
            throw InvalidPotential("polynomial coefficients must be finite");
        }
    }
    f_ = differentiate(F_);
    fp_ = differentiate(f_);
}

PotentialSpec PotentialSpec::double_well(double gamma_minus, double gamma_plus)
{
    return PotentialSpec(PotentialKind::DoubleWell, {0.25, 0.0, -0.5, 0.0, 0.25}, gamma_minus,
                         gamma_plus);
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coeffs, double gamma_minus,
                                        double gamma_plus)
{
    return PotentialSpec(PotentialKind::Polynomial, std::move(coeffs), gamma_minus, gamma_plus);
}

double PotentialSpec::bound_scale() const noexcept
{
    return 1.0 + std::max(std::abs(gamma_minus_), std::abs(gamma_plus_));
}

double eval_F(const PotentialSpec& p, double u) noexcept { return horner(p.coeffs_F(), u); }
double eval_f(const PotentialSpec& p, double u) noexcept { return horner(p.coeffs_f(), u); }
double eval_fprime(const PotentialSpec& p, double u) noexcept
{
    return horner(p.coeffs_fprime(), u);
}

std::vector<double> real_roots_in(std::span<const double> coeffs, double lo, double hi)
{
    const auto c = trimmed(coeffs);
    std::vector<double> roots;
    if (c.size() <= 1) {
        return roots;  // constant polynomial: no isolated roots
    }

    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    }

    if (!companion.allFinite()) {
        throw RootFindingFailure("companion matrix has non-finite entries (leading coefficient " +
                                 std::to_string(c.back()) + ")");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite()) {
        throw RootFindingFailure("companion-matrix eigen-solve did not converge (degree " +
                                 std::to_string(n) + ")");
    }

    const auto dc = differentiate(c);
    const double width = hi - lo;
    for (const auto& z : solver.eigenvalues()) {
        if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) {
            continue;
        }
        double x = z.real();
        // Newton polish; the eigenvalues are only backward stable.
        for (int it = 0; it < 4; ++it) {
            const double d = horner(dc, x);
            if (d == 0.0) {
                break;
            }
            const double px = horner(c, x);
            const double next = x - px / d;
            if (!std::isfinite(next) || std::abs(horner(c, next)) >= std::abs(px)) {
                break;
            }
            x = next;
        }
        const double slack = 1e-12 * (1.0 + width);
        if (x >= lo - slack && x <= hi + slack) {
            roots.push_back(std::clamp(x, lo, hi));
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

StabilityBounds stability_bounds(const PotentialSpec& p)
{
    const double lo = p.gamma_minus();
    const double hi = p.gamma_plus();

    std::vector<double> candidates{lo, hi};
    const auto fpp = differentiate(p.coeffs_fprime());
    const auto interior = real_roots_in(fpp, lo, hi);
    candidates.insert(candidates.end(), interior.begin(), interior.end());

    double max_fp = -std::numeric_limits<double>::infinity();
    double min_fp = std::numeric_limits<double>::infinity();
    for (double u : candidates) {
        const double v = eval_fprime(p, u);
        max_fp = std::max(max_fp, v);
        min_fp = std::min(min_fp, v);
    }

    StabilityBounds b{};
    b.max_fprime = max_fp;
    b.lipschitz_L = -min_fp;
    b.dt_max = max_fp > 0.0 ? 1.0 / max_fp : std::numeric_limits<double>::infinity();
    // 1/x rounded to nearest can overshoot by half an ulp.
    if (max_fp > 0.0 && b.dt_max * max_fp > 1.0) {
        b.dt_max = std::nextafter(b.dt_max, 0.0);
    }
    return b;
}

ValidationReport validate_hypotheses(const PotentialSpec& p)
{
    ValidationReport r{};
    r.tolerance = kHypothesisTol * p.bound_scale();
    r.f_at_gamma_minus = eval_f(p, p.gamma_minus());
    r.f_at_gamma_plus = eval_f(p, p.gamma_plus());
    r.endpoints_vanish =
        std::abs(r.f_at_gamma_minus) <= r.tolerance && std::abs(r.f_at_gamma_plus) <= r.tolerance;
    r.f_at_zero = eval_f(p, 0.0);
    r.zero_strictly_inside = p.gamma_minus() < 0.0 && 0.0 < p.gamma_plus();
    r.f_vanishes_at_zero = r.zero_strictly_inside && std::abs(r.f_at_zero) <= r.tolerance;
    return r;
}

std::string to_string(PotentialKind kind)
{
    return kind == PotentialKind::DoubleWell ? "double_well" : "polynomial";
}

}  // namespace phasefield
