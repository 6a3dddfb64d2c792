#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phasefield {

/// Constant-coefficient periodic tridiagonal system
///
///     diag * x[j] + off * x[j+1] + off * x[j-1] = rhs[j],   j = 0..J-1,
///
/// with indices taken modulo J. The semi-implicit step produces
/// diag = 1 + 2*lambda and off = -lambda.
struct CyclicTridiagonalSystem {
    double diag;
    double off;
    std::vector<double> rhs;

    std::size_t size() const noexcept { return rhs.size(); }
};

/// Reusable workspace for periodic tridiagonal solves (Thomas sweep on the
/// reduced system plus a Sherman-Morrison correction for the corners).
/// One instance per thread.
class CyclicSolver {
public:
    /// Solves with a per-row diagonal and constant off-diagonal/corner entries.
    /// `x` may alias `rhs`. Throws SingularSystem when a pivot magnitude drops
    /// below 1e-30.
    void solve(std::span<const double> diag, double off, std::span<const double> rhs,
               std::span<double> x);

    /// Constant-diagonal solve. Constant right-hand sides give constant
    /// solutions to rounding in rhs / (diag + 2 off).
    void solve(double diag, double off, std::span<const double> rhs, std::span<double> x);

private:
    void thomas(std::span<const double> rhs, std::span<double> out);

    double off_ = 0.0;
    std::vector<double> main_;
    std::vector<double> cprime_;
    std::vector<double> corr_;
    std::vector<double> ucol_;
    std::vector<double> xtmp_;
    std::vector<double> const_diag_;
    std::vector<double> shifted_;
};

std::vector<double> solve_cyclic(const CyclicTridiagonalSystem& sys);

/// Periodic tridiagonal solve with a row-dependent diagonal (Newton Jacobians).
std::vector<double> solve_cyclic(std::span<const double> diag, double off,
                                 std::span<const double> rhs);

/// Row-major J x J assembly of the periodic system.
std::vector<double> assemble_dense(const CyclicTridiagonalSystem& sys);

/// Dense partial-pivoting Gaussian elimination on the assembled matrix.
/// O(J^3); limited to J <= 2048. A pivot below J * eps * ||A||_inf is
/// treated as zero.
std::vector<double> solve_dense_oracle(const CyclicTridiagonalSystem& sys);

/// max_j |(A x - b)_j|
double residual_max_norm(const CyclicTridiagonalSystem& sys, std::span<const double> x);

}  // namespace phasefield
