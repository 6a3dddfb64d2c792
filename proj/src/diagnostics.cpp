#include "phasefield/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace phasefield {

namespace {

constexpr double kEnergyRelTol = 1e-12;
constexpr double kL1RelTol = 1e-12;
constexpr double kL1AbsTol = 1e-14;

bool in_bounds(double lo_val, double hi_val, const PotentialSpec& p, double tol)
{
    return p.gamma_minus() - tol <= lo_val && hi_val <= p.gamma_plus() + tol;
}

MonitorVerdict bound_verdict(double min_val, double max_val, const PotentialSpec& p,
                             double tol, bool active)
{
    MonitorVerdict v{"max_principle"};
    v.active = active;
    v.satisfied = in_bounds(min_val, max_val, p, tol);
    v.margin = std::min(min_val - p.gamma_minus(), p.gamma_plus() - max_val);
    return v;
}

}  // namespace

bool Monitors::all_active_satisfied() const noexcept
{
    for (const auto* v : {&max_principle, &l1_bound, &energy_decay}) {
        if (v->active && !v->satisfied) {
            return false;
        }
    }
    return true;
}

bool MonitorContext::step_condition_holds(const SchemeParams& s) const noexcept
{
    return hypotheses.endpoints_vanish && s.dt() <= bounds.dt_max;
}

MonitorContext make_monitor_context(const PotentialSpec& p)
{
    MonitorContext ctx{validate_hypotheses(p), stability_bounds(p), 1e-12 * p.bound_scale()};
    return ctx;
}

double discrete_energy(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                       const SchemeParams& s)
{
    const auto& phi = state.values;
    const std::size_t n = phi.size();
    const double dx = g.dx();
    double grad = 0.0;
    double pot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = (phi[(j + 1) % n] - phi[j]) / dx;
        grad += d * d;
        pot += eval_F(p, phi[j]);
    }
    const double eps = s.epsilon();
    return 0.5 * eps * eps * grad * dx + pot * dx;
}

double l1_norm(const FieldState& state, const GridSpec& g)
{
    double sum = 0.0;
    for (double v : state.values) {
        sum += std::abs(v);
    }
    return sum * g.dx();
}

Extrema field_extrema(const FieldState& state)
{
    const auto [lo, hi] = std::minmax_element(state.values.begin(), state.values.end());
    return {*lo, *hi};
}

StepRecord initial_record(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                          const SchemeParams& s, const MonitorContext& ctx)
{
    StepRecord r;
    r.step = state.step;
    r.time = state.time;
    r.energy = discrete_energy(state, p, g, s);
    r.l1_norm = l1_norm(state, g);
    const auto ext = field_extrema(state);
    r.min_val = ext.min;
    r.max_val = ext.max;
    const bool start_ok = in_bounds(ext.min, ext.max, p, ctx.bound_tol);
    r.monitors.max_principle =
        bound_verdict(ext.min, ext.max, p, ctx.bound_tol, ctx.step_condition_holds(s) && start_ok);
    return r;
}

Monitors evaluate_monitors(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                           const GridSpec& g, const SchemeParams& s, const MonitorContext& ctx)
{
    Monitors m;
    const auto ext = field_extrema(curr);
    const bool prev_ok = in_bounds(prev.min_val, prev.max_val, p, ctx.bound_tol);
    const bool active = ctx.step_condition_holds(s) && prev_ok;

    m.max_principle = bound_verdict(ext.min, ext.max, p, ctx.bound_tol, active);

    const double l1 = l1_norm(curr, g);
    const double growth = std::exp(ctx.bounds.lipschitz_L * s.dt()) * prev.l1_norm;
    m.l1_bound.active = active && ctx.hypotheses.f_vanishes_at_zero;
    m.l1_bound.satisfied = l1 <= growth * (1.0 + kL1RelTol) + kL1AbsTol;
    m.l1_bound.margin = growth > 0.0 ? (growth - l1) / growth : -l1;

    const double energy = discrete_energy(curr, p, g, s);
    m.energy_decay.active = active;
    m.energy_decay.satisfied =
        energy <= prev.energy + kEnergyRelTol * (1.0 + std::abs(prev.energy));
    m.energy_decay.margin = prev.energy - energy;
    return m;
}

Monitors evaluate_monitors(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                           const GridSpec& g, const SchemeParams& s)
{
    return evaluate_monitors(prev, curr, p, g, s, make_monitor_context(p));
}

StepRecord next_record(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                       const GridSpec& g, const SchemeParams& s, const MonitorContext& ctx)
{
    StepRecord r;
    r.step = curr.step;
    r.time = curr.time;
    r.energy = discrete_energy(curr, p, g, s);
    r.l1_norm = l1_norm(curr, g);
    const auto ext = field_extrema(curr);
    r.min_val = ext.min;
    r.max_val = ext.max;
    r.monitors = evaluate_monitors(prev, curr, p, g, s, ctx);
    return r;
}

}  // namespace phasefield
