#include "phasefield/experiment.hpp"

#include "phasefield/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace phasefield {

using nlohmann::json;

namespace {

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

json real_json(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

template <class T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

json bounds_json(const StabilityBounds& b)
{
    return {{"max_fprime", real_json(b.max_fprime)},
            {"lipschitz_L", real_json(b.lipschitz_L)},
            {"dt_max", real_json(b.dt_max)}};
}

json hypotheses_json(const ValidationReport& r)
{
    return {{"endpoints_vanish", r.endpoints_vanish},
            {"f_at_gamma_minus", real_json(r.f_at_gamma_minus)},
            {"f_at_gamma_plus", real_json(r.f_at_gamma_plus)},
            {"f_vanishes_at_zero", r.f_vanishes_at_zero},
            {"f_at_zero", real_json(r.f_at_zero)},
            {"zero_strictly_inside", r.zero_strictly_inside},
            {"tolerance", r.tolerance}};
}

json config_json(const RunConfig& cfg)
{
    return {{"potential",
             {{"kind", to_string(cfg.potential.kind())},
              {"coeffs", std::vector<double>(cfg.potential.coeffs_F().begin(),
                                             cfg.potential.coeffs_F().end())},
              {"gamma", {cfg.potential.gamma_minus(), cfg.potential.gamma_plus()}}}},
            {"grid", {{"J", cfg.J}, {"length", cfg.length}}},
            {"scheme",
             {{"kind", to_string(cfg.scheme)},
              {"epsilon", cfg.epsilon},
              {"dt", cfg.dt ? json(*cfg.dt) : json("auto")},
              {"steps", cfg.steps},
              {"record_every", cfg.record_every}}},
            {"newton", {{"tol", cfg.newton.tol}, {"max_iters", cfg.newton.max_iters}}},
            {"initial", to_string(cfg.initial)}};
}

json violation_json(const std::optional<FirstViolation>& v)
{
    if (!v) {
        return nullptr;
    }
    return {{"step", v->step}, {"monitor", v->monitor}};
}

std::string optional_step(const std::optional<std::int64_t>& v)
{
    return v ? std::to_string(*v) : std::string("none");
}

}  // namespace

void validate(const RunConfig& cfg)
{
    if (cfg.steps < 1) {
        throw ConfigError("scheme.steps must be >= 1, got " + std::to_string(cfg.steps));
    }
    if (cfg.record_every < 1) {
        throw ConfigError("scheme.record_every must be >= 1, got " +
                          std::to_string(cfg.record_every));
    }
    if (cfg.J < 3) {
        throw ConfigError("grid.J must be >= 3, got " + std::to_string(cfg.J));
    }
    if (!std::isfinite(cfg.length) || !(cfg.length > 0.0)) {
        throw ConfigError("grid.length must be positive");
    }
    if (!std::isfinite(cfg.epsilon) || cfg.epsilon < 0.0) {
        throw ConfigError("scheme.epsilon must be non-negative");
    }
    if (cfg.dt && !(std::isfinite(*cfg.dt) && *cfg.dt > 0.0)) {
        throw ConfigError("scheme.dt must be positive or \"auto\"");
    }
    if (cfg.newton.max_iters < 1 || !(cfg.newton.tol > 0.0)) {
        throw ConfigError("newton.tol must be positive and newton.max_iters >= 1");
    }
}

double resolve_dt(const RunConfig& cfg, const StabilityBounds& bounds)
{
    if (cfg.dt) {
        return *cfg.dt;
    }
    if (!std::isfinite(bounds.dt_max)) {
        throw ConfigError("scheme.dt = \"auto\" needs max f' > 0 on the interval; dt_max is infinite");
    }
    return bounds.dt_max;
}

RunResult run(const RunConfig& cfg)
{
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();

    const auto ctx = make_monitor_context(cfg.potential);
    const double dt = resolve_dt(cfg, ctx.bounds);
    const GridSpec grid(cfg.J, cfg.length);
    const SchemeParams params(cfg.epsilon, dt, grid);
    Stepper stepper(cfg.scheme, cfg.potential, grid, params, cfg.newton);

    RunResult result;
    auto& sum = result.summary;
    sum.dt = dt;
    sum.lambda = params.lambda();
    sum.bounds = ctx.bounds;
    sum.hypotheses = ctx.hypotheses;
    sum.step_condition_holds = ctx.step_condition_holds(params);

    FieldState state = make_initial(cfg.initial, cfg.potential, grid);
    StepRecord prev = initial_record(state, cfg.potential, grid, params, ctx);
    result.records.push_back(prev);
    sum.min_val = prev.min_val;
    sum.max_val = prev.max_val;
    sum.initial_energy = prev.energy;
    if (!prev.monitors.max_principle.satisfied) {
        sum.first_bound_violation_step = 0;
    }

    FieldState last_finite;
    for (std::int64_t n = 1; n <= cfg.steps; ++n) {
        last_finite = state;
        stepper.step(state);
        if (!all_finite(state.values)) {
            sum.diverged_at_step = n;
            if (!sum.first_bound_violation_step) {
                sum.first_bound_violation_step = n;
            }
            if (sum.step_condition_holds && !sum.first_violation) {
                sum.first_violation = FirstViolation{n, "max_principle"};
            }
            state = std::move(last_finite);
            break;
        }

        StepRecord rec = next_record(prev, state, cfg.potential, grid, params, ctx);
        sum.min_val = std::min(sum.min_val, rec.min_val);
        sum.max_val = std::max(sum.max_val, rec.max_val);
        if (!rec.monitors.max_principle.satisfied && !sum.first_bound_violation_step) {
            sum.first_bound_violation_step = n;
        }
        if (!rec.monitors.energy_decay.satisfied && !sum.first_energy_increase_step) {
            sum.first_energy_increase_step = n;
        }
        if (!sum.first_violation) {
            for (const auto* v : {&rec.monitors.max_principle, &rec.monitors.l1_bound,
                                  &rec.monitors.energy_decay}) {
                if (v->active && !v->satisfied) {
                    sum.first_violation = FirstViolation{n, std::string(v->name)};
                    break;
                }
            }
        }
        if (n % cfg.record_every == 0 || n == cfg.steps) {
            result.records.push_back(rec);
        }
        prev = std::move(rec);
    }
    if (result.records.back().step != prev.step) {
        result.records.push_back(prev);
    }

    sum.steps_taken = state.step;
    sum.final_energy = prev.energy;
    result.final_state = std::move(state);
    sum.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool SweepResult::any_active_violation() const noexcept
{
    return std::any_of(rows.begin(), rows.end(),
                       [](const SweepRow& r) { return r.first_active_violation.has_value(); });
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count)
{
    if (count == 0 || !(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw ConfigError("geometric dt grid needs 0 < lo <= hi and count >= 1");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> grid(count);
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = lo * std::exp(ratio * static_cast<double>(i));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

unsigned default_thread_count()
{
    if (const char* env = std::getenv("PHASEFIELD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const SweepConfig& cfg, unsigned max_threads)
{
    if (cfg.dt_grid.empty()) {
        throw ConfigError("sweep dt grid is empty");
    }
    for (std::size_t i = 0; i < cfg.dt_grid.size(); ++i) {
        const double dt = cfg.dt_grid[i];
        if (!std::isfinite(dt) || !(dt > 0.0)) {
            throw ConfigError("sweep dt values must be positive");
        }
        if (i > 0 && !(dt > cfg.dt_grid[i - 1])) {
            throw ConfigError("sweep dt values must be strictly ascending");
        }
    }
    RunConfig base = cfg.base;
    if (cfg.steps_per_dt > 0) {
        base.steps = cfg.steps_per_dt;
    }
    base.dt = cfg.dt_grid.front();
    validate(base);

    SweepResult result;
    const auto ctx = make_monitor_context(base.potential);
    result.bounds = ctx.bounds;
    result.rows.resize(cfg.dt_grid.size());

    auto run_row = [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.dt = cfg.dt_grid[i];
        row.within_bound = row.dt <= ctx.bounds.dt_max;
        row.hypotheses_active = row.within_bound && ctx.hypotheses.endpoints_vanish;
        RunConfig rc = base;
        rc.dt = row.dt;
        rc.record_every = rc.steps;
        try {
            const auto r = run(rc);
            row.first_bound_violation_step = r.summary.first_bound_violation_step;
            row.first_energy_increase_step = r.summary.first_energy_increase_step;
            row.first_active_violation = r.summary.first_violation;
            row.diverged_at_step = r.summary.diverged_at_step;
            row.final_energy = r.summary.diverged_at_step
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : r.summary.final_energy;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.final_energy = std::numeric_limits<double>::quiet_NaN();
        }
    };

    if (max_threads == 0) {
        max_threads = default_thread_count();
    }
    const auto workers =
        static_cast<unsigned>(std::min<std::size_t>(max_threads, result.rows.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            run_row(i);
        }
        return result;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < result.rows.size(); i = next++) {
                run_row(i);
            }
        });
    }
    pool.clear();
    return result;
}

ConvergenceTable convergence_study(const RunConfig& cfg, std::span<const Resolution> ladder,
                                   const RunConfig& reference)
{
    if (ladder.empty()) {
        throw ConfigError("convergence ladder is empty");
    }
    if (!reference.dt) {
        throw ConfigError("convergence reference needs an explicit dt");
    }
    if (std::holds_alternative<RandomUniform>(cfg.initial) ||
        std::holds_alternative<RandomUniform>(reference.initial)) {
        throw ConfigError("convergence studies need grid-independent initial data, not random_uniform");
    }
    if (std::abs(cfg.length - reference.length) > 1e-14 * reference.length) {
        throw ConfigError("ladder and reference domain lengths differ");
    }
    validate(reference);

    ConvergenceTable table;
    table.reference = Resolution{*reference.dt, reference.J};
    table.final_time = static_cast<double>(reference.steps) * *reference.dt;
    const double T = table.final_time;

    std::vector<RunConfig> rung_cfgs;
    for (const auto& r : ladder) {
        if (!(r.dt > 0.0) || r.J < 3) {
            throw ConfigError("ladder rungs need dt > 0 and J >= 3");
        }
        if (reference.J % r.J != 0) {
            throw ConfigError("rung J = " + std::to_string(r.J) +
                              " does not divide reference J = " + std::to_string(reference.J));
        }
        const bool finer_or_equal = *reference.dt <= r.dt && reference.J >= r.J;
        const bool strictly = *reference.dt < r.dt || reference.J > r.J;
        if (!finer_or_equal || !strictly) {
            throw ConfigError("reference must be strictly finer than every ladder rung");
        }
        const double ratio = T / r.dt;
        const double steps = std::round(ratio);
        if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("rung dt = " + format_real(r.dt) +
                              " does not divide the final time " + format_real(T));
        }
        RunConfig rc = cfg;
        rc.dt = r.dt;
        rc.J = r.J;
        rc.steps = static_cast<std::int64_t>(steps);
        rc.record_every = rc.steps;
        rung_cfgs.push_back(rc);
    }

    RunConfig ref_cfg = reference;
    ref_cfg.record_every = ref_cfg.steps;
    const auto ref = run(ref_cfg);
    table.all_active_satisfied = ref.summary.all_active_satisfied();

    const bool same_dx = std::all_of(ladder.begin(), ladder.end(),
                                     [&](const Resolution& r) { return r.J == ladder[0].J; });
    const bool same_dt = std::all_of(ladder.begin(), ladder.end(),
                                     [&](const Resolution& r) { return r.dt == ladder[0].dt; });
    table.refinement = same_dx && same_dt ? "none" : (same_dx ? "time" : (same_dt ? "space" : "time"));

    for (std::size_t i = 0; i < rung_cfgs.size(); ++i) {
        const auto res = run(rung_cfgs[i]);
        table.all_active_satisfied = table.all_active_satisfied && res.summary.all_active_satisfied();
        const std::size_t stride = reference.J / ladder[i].J;
        double err = 0.0;
        for (std::size_t j = 0; j < ladder[i].J; ++j) {
            err = std::max(err, std::abs(res.final_state.values[j] -
                                         ref.final_state.values[j * stride]));
        }
        ConvergenceRow row;
        row.dt = ladder[i].dt;
        row.J = ladder[i].J;
        row.h = table.refinement == "space" ? cfg.length / static_cast<double>(row.J) : row.dt;
        row.error = err;
        if (i > 0) {
            const auto& prev = table.rows.back();
            if (prev.h != row.h && prev.error > 0.0 && row.error > 0.0) {
                row.observed_order = std::log(prev.error / row.error) / std::log(prev.h / row.h);
            }
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_run_csv(std::ostream& out, std::span<const StepRecord> records)
{
    out << "step,time,energy,l1_norm,min_val,max_val,maxprin_active,maxprin_ok,l1_active,l1_ok,"
           "energy_active,energy_ok\n";
    for (const auto& r : records) {
        const auto& m = r.monitors;
        out << r.step << ',' << format_real(r.time) << ',' << format_real(r.energy) << ','
            << format_real(r.l1_norm) << ',' << format_real(r.min_val) << ','
            << format_real(r.max_val) << ',' << m.max_principle.active << ','
            << m.max_principle.satisfied << ',' << m.l1_bound.active << ',' << m.l1_bound.satisfied
            << ',' << m.energy_decay.active << ',' << m.energy_decay.satisfied << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << "dt,within_bound,first_bound_violation_step,first_energy_increase_step,final_energy\n";
    for (const auto& r : result.rows) {
        out << format_real(r.dt) << ',' << r.within_bound << ','
            << optional_step(r.first_bound_violation_step) << ','
            << optional_step(r.first_energy_increase_step) << ',' << format_real(r.final_energy)
            << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table)
{
    out << "dt,J,h,error,observed_order\n";
    for (const auto& r : table.rows) {
        out << format_real(r.dt) << ',' << r.J << ',' << format_real(r.h) << ','
            << format_real(r.error) << ','
            << (r.observed_order ? format_real(*r.observed_order) : std::string("none")) << '\n';
    }
}

std::string run_summary_json(const RunConfig& cfg, const RunSummary& s)
{
    json j{{"config", config_json(cfg)},
           {"dt", s.dt},
           {"lambda", s.lambda},
           {"stability_bounds", bounds_json(s.bounds)},
           {"hypotheses", hypotheses_json(s.hypotheses)},
           {"step_condition_holds", s.step_condition_holds},
           {"steps_taken", s.steps_taken},
           {"min_val", real_json(s.min_val)},
           {"max_val", real_json(s.max_val)},
           {"initial_energy", real_json(s.initial_energy)},
           {"final_energy", real_json(s.final_energy)},
           {"first_violation", violation_json(s.first_violation)},
           {"first_bound_violation_step", optional_json(s.first_bound_violation_step)},
           {"first_energy_increase_step", optional_json(s.first_energy_increase_step)},
           {"diverged_at_step", optional_json(s.diverged_at_step)},
           {"all_active_satisfied", s.all_active_satisfied()},
           {"wall_time_s", s.wall_time_s}};
    return j.dump(2);
}

std::string sweep_summary_json(const SweepConfig& cfg, const SweepResult& result)
{
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"dt", r.dt},
                        {"within_bound", r.within_bound},
                        {"hypotheses_active", r.hypotheses_active},
                        {"first_bound_violation_step", optional_json(r.first_bound_violation_step)},
                        {"first_energy_increase_step", optional_json(r.first_energy_increase_step)},
                        {"first_active_violation", violation_json(r.first_active_violation)},
                        {"diverged_at_step", optional_json(r.diverged_at_step)},
                        {"final_energy", real_json(r.final_energy)},
                        {"error", r.error ? json(*r.error) : json(nullptr)}});
    }
    json j{{"config", config_json(cfg.base)},
           {"steps_per_dt", cfg.steps_per_dt > 0 ? cfg.steps_per_dt : cfg.base.steps},
           {"stability_bounds", bounds_json(result.bounds)},
           {"any_active_violation", result.any_active_violation()},
           {"rows", rows}};
    return j.dump(2);
}

std::string convergence_summary_json(const ConvergenceTable& table)
{
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"dt", r.dt},
                        {"J", r.J},
                        {"h", r.h},
                        {"error", real_json(r.error)},
                        {"observed_order", r.observed_order ? real_json(*r.observed_order)
                                                            : json(nullptr)}});
    }
    json j{{"final_time", table.final_time},
           {"reference", {{"dt", table.reference.dt}, {"J", table.reference.J}}},
           {"refinement", table.refinement},
           {"all_active_satisfied", table.all_active_satisfied},
           {"rows", rows}};
    return j.dump(2);
}

}  // namespace phasefield
