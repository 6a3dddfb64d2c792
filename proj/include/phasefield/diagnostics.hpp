#pragma once

#include "phasefield/potential.hpp"
#include "phasefield/scheme.hpp"

#include <cstdint>
#include <string_view>

namespace phasefield {

struct MonitorVerdict {
    std::string_view name;
    bool active = false;     // hypotheses of the corresponding estimate hold for this step
    bool satisfied = true;
    double margin = 0.0;     // positive when satisfied with room to spare
};

struct Monitors {
    MonitorVerdict max_principle{"max_principle"};
    MonitorVerdict l1_bound{"l1_bound"};
    MonitorVerdict energy_decay{"energy_decay"};

    /// True when no active monitor is violated.
    bool all_active_satisfied() const noexcept;
};

struct StepRecord {
    std::int64_t step = 0;
    double time = 0.0;
    double energy = 0.0;
    double l1_norm = 0.0;
    double min_val = 0.0;
    double max_val = 0.0;
    Monitors monitors;
};

/// Hypothesis data shared by every step of a run.
struct MonitorContext {
    ValidationReport hypotheses;
    StabilityBounds bounds;
    double bound_tol;  // 1e-12 * (1 + max|gamma|)

    /// Endpoint zeros of f and dt <= dt_max.
    bool step_condition_holds(const SchemeParams& s) const noexcept;
};

MonitorContext make_monitor_context(const PotentialSpec& p);

/// E_h = eps^2/2 sum (D+ phi_j)^2 dx + sum F(phi_j) dx with periodic wraparound.
double discrete_energy(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                       const SchemeParams& s);

/// sum |phi_j| dx
double l1_norm(const FieldState& state, const GridSpec& g);

struct Extrema {
    double min;
    double max;
};

Extrema field_extrema(const FieldState& state);

/// Record for the initial level. Only the bound check is evaluated there;
/// it is active when the step condition holds and phi_0 lies in the interval.
StepRecord initial_record(const FieldState& state, const PotentialSpec& p, const GridSpec& g,
                          const SchemeParams& s, const MonitorContext& ctx);

/// Verdicts for the step prev -> curr.
///
/// The bound check is active when f vanishes at both endpoints, dt <= dt_max
/// and the previous level lies in the interval (the induction hypothesis).
/// The L1 check additionally needs f(0) = 0 with gamma_- < 0 < gamma_+.
/// The energy check shares the hypotheses of the bound check.
Monitors evaluate_monitors(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                           const GridSpec& g, const SchemeParams& s, const MonitorContext& ctx);

Monitors evaluate_monitors(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                           const GridSpec& g, const SchemeParams& s);

/// Computes energy, L1 norm and extrema of `curr` and attaches the verdicts
/// for the step prev -> curr.
StepRecord next_record(const StepRecord& prev, const FieldState& curr, const PotentialSpec& p,
                       const GridSpec& g, const SchemeParams& s, const MonitorContext& ctx);

}  // namespace phasefield
