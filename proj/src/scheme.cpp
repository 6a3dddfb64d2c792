#include "phasefield/scheme.hpp"

#include "phasefield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace phasefield {

GridSpec::GridSpec(std::size_t J, double length) : J_(J), length_(length), dx_(0.0)
{
    if (J < 3) {
        throw InvalidGrid("periodic grid needs J >= 3, got J = " + std::to_string(J));
    }
    if (!std::isfinite(length) || !(length > 0.0)) {
        throw InvalidGrid("domain length must be positive and finite");
    }
    dx_ = length / static_cast<double>(J);
}

SchemeParams::SchemeParams(double epsilon, double dt, const GridSpec& grid)
    : epsilon_(epsilon), dt_(dt), lambda_(0.0)
{
    // epsilon = 0 is allowed: it decouples the nodes and is used to check
    // the pointwise reduction of the steppers.
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw ConfigError("epsilon must be finite and non-negative");
    }
    if (!std::isfinite(dt) || !(dt > 0.0)) {
        throw ConfigError("dt must be positive and finite");
    }
    lambda_ = epsilon * epsilon * dt / (grid.dx() * grid.dx());
}

std::string to_string(SchemeKind kind)
{
    switch (kind) {
    case SchemeKind::SemiImplicit:
        return "semi_implicit";
    case SchemeKind::Explicit:
        return "explicit";
    case SchemeKind::ConvexSplitting:
        return "convex_splitting";
    }
    return "unknown";
}

Stepper::Stepper(SchemeKind kind, PotentialSpec potential, GridSpec grid, SchemeParams params,
                 NewtonParams newton)
    : kind_(kind),
      potential_(std::move(potential)),
      grid_(grid),
      params_(params),
      newton_(newton)
{
    if (kind_ == SchemeKind::ConvexSplitting && potential_.kind() != PotentialKind::DoubleWell) {
        throw InvalidPotential("convex splitting is only defined for the double-well potential");
    }
    const std::size_t n = grid_.J();
    rhs_.resize(n);
    next_.resize(n);
}

void Stepper::step(FieldState& state)
{
    if (state.values.size() != grid_.J()) {
        throw InvalidGrid("field has " + std::to_string(state.values.size()) +
                          " values but the grid has J = " + std::to_string(grid_.J()));
    }
    switch (kind_) {
    case SchemeKind::SemiImplicit:
        step_semi_implicit(state);
        break;
    case SchemeKind::Explicit:
        step_explicit(state);
        break;
    case SchemeKind::ConvexSplitting:
        step_convex_splitting(state);
        break;
    }
    state.step += 1;
    state.time = static_cast<double>(state.step) * params_.dt();
}

void Stepper::step_semi_implicit(FieldState& state)
{
    const double dt = params_.dt();
    const double lambda = params_.lambda();
    auto& phi = state.values;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        rhs_[j] = phi[j] - dt * eval_f(potential_, phi[j]);
    }
    solver_.solve(1.0 + 2.0 * lambda, -lambda, rhs_, phi);
}

void Stepper::step_explicit(FieldState& state)
{
    const double dt = params_.dt();
    const double lambda = params_.lambda();
    const auto& phi = state.values;
    const std::size_t n = phi.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double left = phi[(j + n - 1) % n];
        const double right = phi[(j + 1) % n];
        next_[j] = phi[j] + lambda * ((right + left) - 2.0 * phi[j]) - dt * eval_f(potential_, phi[j]);
    }
    state.values.swap(next_);
}

void Stepper::step_convex_splitting(FieldState& state)
{
    const double dt = params_.dt();
    const double lambda = params_.lambda();
    const double diag = 1.0 + 2.0 * lambda;
    auto& phi = state.values;
    const std::size_t n = phi.size();

    jac_diag_.resize(n);
    residual_.resize(n);
    delta_.resize(n);

    // (1 + 2 lambda) u - lambda (u+ + u-) + dt u^3 = phi + dt phi
    for (std::size_t j = 0; j < n; ++j) {
        rhs_[j] = phi[j] + dt * phi[j];
    }
    std::copy(phi.begin(), phi.end(), next_.begin());
    auto& u = next_;

    for (int iter = 1; iter <= newton_.max_iters; ++iter) {
        for (std::size_t j = 0; j < n; ++j) {
            const double uj = u[j];
            residual_[j] = diag * uj - lambda * (u[(j + 1) % n] + u[(j + n - 1) % n]) +
                           dt * uj * uj * uj - rhs_[j];
            jac_diag_[j] = diag + 3.0 * dt * uj * uj;
        }
        solver_.solve(jac_diag_, -lambda, residual_, delta_);
        double update = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            u[j] -= delta_[j];
            update = std::max(update, std::abs(delta_[j]));
        }
        if (!std::isfinite(update)) {
            break;
        }
        if (update <= newton_.tol) {
            phi.swap(u);
            return;
        }
    }
    std::ostringstream msg;
    msg << "convex-splitting Newton did not converge in " << newton_.max_iters
        << " iterations (dt = " << dt << ")";
    throw NewtonDivergence(msg.str());
}

FieldState step_semi_implicit(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                              const SchemeParams& s)
{
    return advance(SchemeKind::SemiImplicit, state, p, g, s);
}

FieldState step_explicit(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                         const SchemeParams& s)
{
    return advance(SchemeKind::Explicit, state, p, g, s);
}

FieldState step_convex_splitting(const FieldState& state, const PotentialSpec& p,
                                 const GridSpec& g, const SchemeParams& s,
                                 const NewtonParams& newton)
{
    return advance(SchemeKind::ConvexSplitting, state, p, g, s, newton);
}

FieldState advance(SchemeKind kind, const FieldState& state, const PotentialSpec& p,
                   const GridSpec& g, const SchemeParams& s, const NewtonParams& newton)
{
    Stepper stepper(kind, p, g, s, newton);
    FieldState next = state;
    stepper.step(next);
    return next;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string to_string(const InitialCondition& ic)
{
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const RandomUniform& r) { out << "random_uniform(seed=" << r.seed << ")"; },
                   [&](const SineWave& w) {
                       out << "sine_wave(amplitude=" << w.amplitude << ", modes=" << w.modes << ")";
                   },
                   [&](const TanhFront& t) {
                       out << "tanh_front(center=" << t.center << ", width=" << t.width << ")";
                   },
                   [&](const ConstantField& c) { out << "constant(value=" << c.value << ")"; },
               },
               ic);
    return out.str();
}

FieldState make_initial(const InitialCondition& ic, const PotentialSpec& p, const GridSpec& g)
{
    const double lo = p.gamma_minus();
    const double hi = p.gamma_plus();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const std::size_t n = g.J();

    FieldState state;
    state.values.resize(n);
    auto& v = state.values;

    std::visit(
        overloaded{
            [&](const RandomUniform& r) {
                std::mt19937_64 rng(r.seed);
                std::uniform_real_distribution<double> dist(lo, hi);
                for (auto& x : v) {
                    x = dist(rng);
                }
            },
            [&](const SineWave& w) {
                if (!std::isfinite(w.amplitude) || w.amplitude < 0.0 || w.amplitude > half) {
                    std::ostringstream msg;
                    msg << "sine amplitude " << w.amplitude << " does not fit the interval ["
                        << lo << ", " << hi << "] (half-width " << half << ")";
                    throw InvalidInitialData(msg.str());
                }
                if (w.modes < 0) {
                    throw InvalidInitialData("sine mode count must be non-negative");
                }
                const double k = 2.0 * std::numbers::pi * w.modes / g.length();
                for (std::size_t j = 0; j < n; ++j) {
                    v[j] = mid + w.amplitude * std::sin(k * g.x(j));
                }
            },
            [&](const TanhFront& t) {
                if (!std::isfinite(t.width) || !(t.width > 0.0) || !std::isfinite(t.center)) {
                    throw InvalidInitialData("tanh front needs a finite center and width > 0");
                }
                for (std::size_t j = 0; j < n; ++j) {
                    v[j] = mid + half * std::tanh((g.x(j) - t.center) / t.width);
                }
            },
            [&](const ConstantField& c) {
                if (!(c.value >= lo && c.value <= hi)) {
                    std::ostringstream msg;
                    msg << "constant " << c.value << " lies outside [" << lo << ", " << hi << "]";
                    throw InvalidInitialData(msg.str());
                }
                std::fill(v.begin(), v.end(), c.value);
            },
        },
        ic);

    std::size_t clamped = 0;
    for (auto& x : v) {
        const double c = std::clamp(x, lo, hi);
        if (c != x) {
            x = c;
            ++clamped;
        }
    }
    if (clamped > 0) {
        std::clog << "make_initial: clamped " << clamped << " of " << n << " values of "
                  << to_string(ic) << " into [" << lo << ", " << hi << "]\n";
    }
    return state;
}

}  // namespace phasefield
