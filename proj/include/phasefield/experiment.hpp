#pragma once

#include "phasefield/diagnostics.hpp"
#include "phasefield/potential.hpp"
#include "phasefield/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phasefield {

struct RunConfig {
    PotentialSpec potential = PotentialSpec::double_well();
    std::size_t J = 256;
    double length = 1.0;
    SchemeKind scheme = SchemeKind::SemiImplicit;
    double epsilon = 0.01;
    std::optional<double> dt;  // empty means "auto", i.e. dt_max
    std::int64_t steps = 0;
    std::int64_t record_every = 1;
    InitialCondition initial = RandomUniform{42};
    NewtonParams newton;
    std::filesystem::path output = ".";
};

/// Throws ConfigError on a violated field invariant.
void validate(const RunConfig& cfg);

/// Resolves "auto" to dt_max. ConfigError when dt_max is infinite.
double resolve_dt(const RunConfig& cfg, const StabilityBounds& bounds);

struct FirstViolation {
    std::int64_t step;
    std::string monitor;
};

struct RunSummary {
    double dt = 0.0;
    double lambda = 0.0;
    StabilityBounds bounds{};
    ValidationReport hypotheses{};
    bool step_condition_holds = false;
    std::int64_t steps_taken = 0;
    double min_val = 0.0;  // over every step of the run
    double max_val = 0.0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::optional<FirstViolation> first_violation;  // active monitors only
    std::optional<std::int64_t> first_bound_violation_step;  // regardless of hypotheses
    std::optional<std::int64_t> first_energy_increase_step;  // regardless of hypotheses
    std::optional<std::int64_t> diverged_at_step;  // step that produced a non-finite value
    double wall_time_s = 0.0;

    bool all_active_satisfied() const noexcept { return !first_violation.has_value(); }
};

struct RunResult {
    std::vector<StepRecord> records;  // step 0, every record_every-th step, final step
    FieldState final_state;
    RunSummary summary;
};

/// Integrates cfg.steps steps, evaluating the monitors after every step.
/// A step that produces a non-finite value ends the run early; the final
/// state is then the last finite level.
RunResult run(const RunConfig& cfg);

struct SweepConfig {
    RunConfig base;
    std::vector<double> dt_grid;  // strictly positive, strictly ascending
    std::int64_t steps_per_dt = 0;  // 0 means base.steps
};

struct SweepRow {
    double dt = 0.0;
    bool within_bound = false;  // dt <= dt_max
    bool hypotheses_active = false;  // within_bound and f vanishes at the endpoints
    std::optional<std::int64_t> first_bound_violation_step;
    std::optional<std::int64_t> first_energy_increase_step;
    std::optional<FirstViolation> first_active_violation;
    std::optional<std::int64_t> diverged_at_step;
    double final_energy = 0.0;
    std::optional<std::string> error;
};

struct SweepResult {
    StabilityBounds bounds{};
    std::vector<SweepRow> rows;

    bool any_active_violation() const noexcept;
};

/// One run per dt. Rows are independent and may run concurrently; a row that
/// throws records its message and does not abort the sweep.
SweepResult sweep(const SweepConfig& cfg, unsigned max_threads = 0);

/// Geometric dt grid lo, ..., hi with `count` points.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

struct Resolution {
    double dt;
    std::size_t J;
};

struct ConvergenceRow {
    double dt = 0.0;
    std::size_t J = 0;
    double h = 0.0;
    double error = 0.0;  // max-norm difference at the final time
    std::optional<double> observed_order;  // against the previous row
};

struct ConvergenceTable {
    double final_time = 0.0;
    Resolution reference{};
    std::string refinement;  // "time", "space" or "none"
    std::vector<ConvergenceRow> rows;
    bool all_active_satisfied = true;
};

/// Runs every ladder rung and the reference to the reference's final time and
/// compares by injection: rung node j matches reference node j * (J_ref / J).
/// ConfigError when grids are not nested, final times do not align, the
/// reference is not strictly finer, or the initial data is random.
ConvergenceTable convergence_study(const RunConfig& cfg, std::span<const Resolution> ladder,
                                   const RunConfig& reference);

/// Sweep parallelism cap: PHASEFIELD_THREADS if set and positive, else the
/// number of logical processors.
unsigned default_thread_count();

void write_run_csv(std::ostream& out, std::span<const StepRecord> records);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

/// Formats with 17 significant digits.
std::string format_real(double v);

std::string run_summary_json(const RunConfig& cfg, const RunSummary& summary);
std::string sweep_summary_json(const SweepConfig& cfg, const SweepResult& result);
std::string convergence_summary_json(const ConvergenceTable& table);

}  // namespace phasefield
