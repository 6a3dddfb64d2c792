#pragma once

#include "phasefield/linalg.hpp"
#include "phasefield/potential.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace phasefield {

/// Periodic 1-D grid with nodes x_j = j * dx, j = 0..J-1; node J wraps to node 0.
class GridSpec {
public:
    GridSpec(std::size_t J, double length);

    std::size_t J() const noexcept { return J_; }
    double dx() const noexcept { return dx_; }
    double length() const noexcept { return length_; }
    double x(std::size_t j) const noexcept { return static_cast<double>(j) * dx_; }

private:
    std::size_t J_;
    double length_;
    double dx_;
};

/// Interface width, time step and the cached mesh ratio lambda = eps^2 dt / dx^2.
class SchemeParams {
public:
    SchemeParams(double epsilon, double dt, const GridSpec& grid);

    double epsilon() const noexcept { return epsilon_; }
    double dt() const noexcept { return dt_; }
    double lambda() const noexcept { return lambda_; }

private:
    double epsilon_;
    double dt_;
    double lambda_;
};

struct FieldState {
    std::vector<double> values;
    double time = 0.0;
    std::int64_t step = 0;
};

struct NewtonParams {
    double tol = 1e-12;
    int max_iters = 50;
};

enum class SchemeKind { SemiImplicit, Explicit, ConvexSplitting };

std::string to_string(SchemeKind kind);

/// One step of the semi-implicit scheme: the Laplacian is taken at the new
/// level and f at the old one, so
///
///     (1 + 2 lambda) u[j] - lambda (u[j+1] + u[j-1]) = phi[j] - dt f(phi[j]).
FieldState step_semi_implicit(const FieldState& state, const PotentialSpec& p,
                              const GridSpec& g, const SchemeParams& s);

/// Forward Euler on the same three-point stencil.
FieldState step_explicit(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                         const SchemeParams& s);

/// Eyre convex splitting for the double well, u^3 implicit and -u explicit.
/// The nonlinear system is solved by Newton starting from the old level.
/// Throws NewtonDivergence after newton.max_iters iterations without the
/// max-norm update dropping to newton.tol.
FieldState step_convex_splitting(const FieldState& state, const PotentialSpec& p,
                                 const GridSpec& g, const SchemeParams& s,
                                 const NewtonParams& newton = {});

/// Dispatches on `kind`.
FieldState advance(SchemeKind kind, const FieldState& state, const PotentialSpec& p,
                   const GridSpec& g, const SchemeParams& s, const NewtonParams& newton = {});

/// Stateful stepper that reuses its solve workspace across steps. Produces
/// the same values as the free functions.
class Stepper {
public:
    Stepper(SchemeKind kind, PotentialSpec potential, GridSpec grid, SchemeParams params,
            NewtonParams newton = {});

    /// Advances `state` in place by one step.
    void step(FieldState& state);

    SchemeKind kind() const noexcept { return kind_; }
    const PotentialSpec& potential() const noexcept { return potential_; }
    const GridSpec& grid() const noexcept { return grid_; }
    const SchemeParams& params() const noexcept { return params_; }

private:
    void step_semi_implicit(FieldState& state);
    void step_explicit(FieldState& state);
    void step_convex_splitting(FieldState& state);

    SchemeKind kind_;
    PotentialSpec potential_;
    GridSpec grid_;
    SchemeParams params_;
    NewtonParams newton_;
    CyclicSolver solver_;
    std::vector<double> rhs_;
    std::vector<double> next_;
    std::vector<double> jac_diag_;
    std::vector<double> residual_;
    std::vector<double> delta_;
};

struct RandomUniform {
    std::uint64_t seed = 0;
};

/// mid + amplitude * sin(2 pi modes x / length), mid the centre of the interval.
struct SineWave {
    double amplitude = 0.5;
    int modes = 1;
};

/// mid + half_width * tanh((x - center) / width).
struct TanhFront {
    double center = 0.5;
    double width = 0.05;
};

struct ConstantField {
    double value = 0.0;
};

using InitialCondition = std::variant<RandomUniform, SineWave, TanhFront, ConstantField>;

std::string to_string(const InitialCondition& ic);

/// Samples the initial condition on the grid. Values are clamped into
/// [gamma_-, gamma_+] afterwards; clamping is reported on std::clog.
/// Throws InvalidInitialData when the request cannot fit the interval.
FieldState make_initial(const InitialCondition& ic, const PotentialSpec& p, const GridSpec& g);

}  // namespace phasefield
