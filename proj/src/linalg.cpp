#include "phasefield/linalg.hpp"

#include "phasefield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace phasefield {

namespace {

constexpr double kPivotFloor = 1e-30;

void require_cyclic_size(std::size_t n)
{
    if (n < 3) {
        throw InvalidGrid("cyclic tridiagonal system needs J >= 3, got J = " + std::to_string(n));
    }
}

void check_pivot(double pivot, std::size_t row)
{
    if (!(std::abs(pivot) >= kPivotFloor)) {
        throw SingularSystem("pivot " + std::to_string(pivot) + " at row " + std::to_string(row));
    }
}

}  // namespace

void CyclicSolver::thomas(std::span<const double> rhs, std::span<double> out)
{
    const std::size_t n = main_.size();
    double pivot = main_[0];
    check_pivot(pivot, 0);
    out[0] = rhs[0] / pivot;
    for (std::size_t j = 1; j < n; ++j) {
        cprime_[j] = off_ / pivot;
        pivot = main_[j] - off_ * cprime_[j];
        check_pivot(pivot, j);
        out[j] = (rhs[j] - off_ * out[j - 1]) / pivot;
    }
    for (std::size_t j = n - 1; j-- > 0;) {
        out[j] -= cprime_[j + 1] * out[j + 1];
    }
}

void CyclicSolver::solve(std::span<const double> diag, double off, std::span<const double> rhs,
                         std::span<double> x)
{
    const std::size_t n = rhs.size();
    require_cyclic_size(n);
    if (diag.size() != n || x.size() != n) {
        throw InvalidGrid("cyclic solve: diagonal, rhs and solution sizes differ");
    }

    off_ = off;
    main_.assign(diag.begin(), diag.end());
    cprime_.resize(n);
    corr_.resize(n);
    ucol_.assign(n, 0.0);
    xtmp_.resize(n);

    // Rank-one split: A = T + u v^T with u = (gamma, 0, .., off), v = (1, 0, .., off / gamma).
    const double gamma = -diag[0];
    check_pivot(gamma, 0);
    main_[0] = diag[0] - gamma;
    main_[n - 1] = diag[n - 1] - off * off / gamma;
    ucol_[0] = gamma;
    ucol_[n - 1] = off;

    thomas(rhs, xtmp_);
    thomas(ucol_, corr_);

    const double denom = 1.0 + corr_[0] + off * corr_[n - 1] / gamma;
    check_pivot(denom, n);
    const double fact = (xtmp_[0] + off * xtmp_[n - 1] / gamma) / denom;
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = xtmp_[j] - fact * corr_[j];
    }
}

void CyclicSolver::solve(double diag, double off, std::span<const double> rhs,
                         std::span<double> x)
{
    const std::size_t n = rhs.size();
    require_cyclic_size(n);
    if (off == 0.0) {
        check_pivot(diag, 0);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = rhs[j] / diag;
        }
        return;
    }
    const_diag_.assign(n, diag);

    // Constant vectors are eigenvectors with eigenvalue diag + 2 off. Solving
    // for the deviation from rhs[0] keeps constant right-hand sides exact.
    const double row_sum = diag + 2.0 * off;
    if (!(std::abs(row_sum) > 1e-8 * std::abs(diag))) {
        solve(const_diag_, off, rhs, x);
        return;
    }
    const double base = rhs[0];
    shifted_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        shifted_[j] = rhs[j] - base;
    }
    solve(const_diag_, off, shifted_, x);
    const double mean_part = base / row_sum;
    for (std::size_t j = 0; j < n; ++j) {
        x[j] += mean_part;
    }
}

std::vector<double> solve_cyclic(const CyclicTridiagonalSystem& sys)
{
    std::vector<double> x(sys.size());
    CyclicSolver solver;
    solver.solve(sys.diag, sys.off, sys.rhs, x);
    return x;
}

std::vector<double> solve_cyclic(std::span<const double> diag, double off,
                                 std::span<const double> rhs)
{
    std::vector<double> x(rhs.size());
    CyclicSolver solver;
    solver.solve(diag, off, rhs, x);
    return x;
}

std::vector<double> assemble_dense(const CyclicTridiagonalSystem& sys)
{
    const std::size_t n = sys.size();
    require_cyclic_size(n);
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] = sys.diag;
        a[i * n + (i + 1) % n] += sys.off;
        a[i * n + (i + n - 1) % n] += sys.off;
    }
    return a;
}

std::vector<double> solve_dense_oracle(const CyclicTridiagonalSystem& sys)
{
    const std::size_t n = sys.size();
    if (n > 2048) {
        throw InvalidGrid("dense oracle limited to J <= 2048, got J = " + std::to_string(n));
    }
    auto a = assemble_dense(sys);
    std::vector<double> b = sys.rhs;
    const double norm = std::abs(sys.diag) + 2.0 * std::abs(sys.off);
    const double pivot_floor =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) {
                piv = i;
            }
        }
        if (!(std::abs(a[piv * n + k]) > pivot_floor)) {
            throw SingularSystem("zero pivot in dense elimination at column " + std::to_string(k));
        }
        if (piv != k) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(k * n),
                             a.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                             a.begin() + static_cast<std::ptrdiff_t>(piv * n));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i * n + k] / a[k * n + k];
            if (m == 0.0) {
                continue;
            }
            for (std::size_t j = k; j < n; ++j) {
                a[i * n + j] -= m * a[k * n + j];
            }
            b[i] -= m * b[k];
        }
    }

    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    return x;
}

double residual_max_norm(const CyclicTridiagonalSystem& sys, std::span<const double> x)
{
    const std::size_t n = sys.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ax =
            sys.diag * x[j] + sys.off * x[(j + 1) % n] + sys.off * x[(j + n - 1) % n];
        worst = std::max(worst, std::abs(ax - sys.rhs[j]));
    }
    return worst;
}

}  // namespace phasefield
