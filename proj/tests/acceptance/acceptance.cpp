// Acceptance checks for the semi-implicit Allen-Cahn solver. Prints one
// PASS/FAIL line per criterion and exits non-zero if any criterion fails.

#include "phasefield/diagnostics.hpp"
#include "phasefield/experiment.hpp"
#include "phasefield/linalg.hpp"
#include "phasefield/potential.hpp"
#include "phasefield/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace phasefield;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& check)
{
    Verdict v{false, ""};
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d. %s: %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) {
        ++failures;
    }
}

std::string fmt(const char* f, double a)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

RunConfig theorem_run()
{
    RunConfig cfg;
    cfg.potential = PotentialSpec::double_well(-1.0, 1.0);
    cfg.J = 256;
    cfg.length = 1.0;
    cfg.scheme = SchemeKind::SemiImplicit;
    cfg.epsilon = 0.01;
    cfg.dt = 0.5;
    cfg.steps = 10000;
    cfg.record_every = 1;
    cfg.initial = RandomUniform{42};
    return cfg;
}

double bisect_cubic(double dt, double rhs)
{
    double lo = -10.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid + dt * mid * mid * mid < rhs ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool orders_within(const ConvergenceTable& t, double target, double tol, std::string& detail)
{
    bool ok = t.rows.size() >= 2;
    for (const auto& r : t.rows) {
        if (&r == &t.rows.front()) {
            continue;
        }
        ok = ok && r.observed_order && std::abs(*r.observed_order - target) <= tol;
        detail += r.observed_order ? fmt(" %.4f", *r.observed_order) : " none";
    }
    return ok;
}

}  // namespace

int main()
{
    const auto t_run = Clock::now();
    const auto base = run(theorem_run());
    const double run_seconds = seconds_since(t_run);
    const auto& recs = base.records;

    report(1, "maximum principle, J=256, eps=0.01, dt=dt_max=0.5, 10000 steps", [&] {
        const double tol = 1e-12;
        double lo = 1.0;
        double hi = -1.0;
        bool ok = recs.size() == 10001;
        for (const auto& r : recs) {
            ok = ok && r.min_val >= -1.0 - tol && r.max_val <= 1.0 + tol;
            lo = std::min(lo, r.min_val);
            hi = std::max(hi, r.max_val);
        }
        ok = ok && run_seconds <= 10.0;
        return Verdict{ok, "range [" + fmt("%.17g", lo) + ", " + fmt("%.17g", hi) + "], " +
                               fmt("%.3f s", run_seconds)};
    });

    report(2, "energy dissipation on the same run", [&] {
        bool ok = recs.size() == 10001;
        double worst = -INFINITY;
        for (std::size_t n = 1; n < recs.size(); ++n) {
            const double prev = recs[n - 1].energy;
            const double inc = recs[n].energy - prev;
            ok = ok && inc <= 1e-12 * (1.0 + std::abs(prev));
            worst = std::max(worst, inc);
        }
        double min_drop = INFINITY;
        for (std::size_t n = 1; n <= 100; ++n) {
            min_drop = std::min(min_drop, recs[n - 1].energy - recs[n].energy);
        }
        ok = ok && min_drop > 0.0;
        return Verdict{ok, "largest step change " + fmt("%.3e", worst) +
                               ", smallest drop over first 100 steps " + fmt("%.3e", min_drop) +
                               ", E " + fmt("%.6f", recs.front().energy) + " -> " +
                               fmt("%.6f", recs.back().energy)};
    });

    report(3, "L1 stability with L = 1 on the same run", [&] {
        const double L = base.summary.bounds.lipschitz_L;
        bool ok = std::abs(L - 1.0) <= 1e-12 && recs.size() == 10001;
        double worst = 0.0;
        for (std::size_t n = 1; n < recs.size(); ++n) {
            const double bound = std::exp(1.0 * 0.5) * recs[n - 1].l1_norm * (1.0 + 1e-9);
            ok = ok && recs[n].l1_norm <= bound;
            worst = std::max(worst, recs[n].l1_norm / (std::exp(0.5) * recs[n - 1].l1_norm));
        }
        return Verdict{ok, "L = " + fmt("%.17g", L) + ", max ratio to bound " + fmt("%.6f", worst)};
    });

    report(4, "stability bounds of the double well on [-1, 1]", [&] {
        const auto b = stability_bounds(PotentialSpec::double_well());
        const bool ok = std::abs(b.max_fprime - 2.0) <= 1e-12 &&
                        std::abs(b.lipschitz_L - 1.0) <= 1e-12 && std::abs(b.dt_max - 0.5) <= 1e-12;
        return Verdict{ok, "max f' = " + fmt("%.17g", b.max_fprime) + ", L = " +
                               fmt("%.17g", b.lipschitz_L) + ", dt_max = " + fmt("%.17g", b.dt_max)};
    });

    report(5, "cyclic solver vs dense oracle, 1000 random systems", [&] {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> lam(0.0, 100.0);
        std::uniform_int_distribution<std::size_t> size(3, 257);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            double lambda = lam(rng);
            if (lambda == 0.0) {
                lambda = 100.0;
            }
            CyclicTridiagonalSystem sys{1.0 + 2.0 * lambda, -lambda, std::vector<double>(size(rng))};
            for (auto& b : sys.rhs) {
                b = val(rng);
            }
            const auto x = solve_cyclic(sys);
            const auto y = solve_dense_oracle(sys);
            double diff = 0.0;
            double scale = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                diff = std::max(diff, std::abs(x[j] - y[j]));
                scale = std::max(scale, std::abs(y[j]));
            }
            worst = std::max(worst, diff / std::max(scale, 1e-300));
        }
        const double secs = seconds_since(t0);
        return Verdict{worst <= 1e-10 && secs <= 5.0,
                       "worst relative max-norm " + fmt("%.3e", worst) + ", " + fmt("%.3f s", secs)};
    });

    report(6, "convergence orders (time 1.0 +- 0.15, space 2.0 +- 0.2)", [&] {
        const auto t0 = Clock::now();
        RunConfig cfg;
        cfg.potential = PotentialSpec::double_well();
        cfg.length = 1.0;
        cfg.epsilon = 0.1;
        cfg.initial = SineWave{0.5, 1};
        cfg.steps = 1;
        const double T = 0.1;

        cfg.J = 512;
        const std::vector<Resolution> temporal{{1e-2, 512}, {5e-3, 512}, {2.5e-3, 512}, {1.25e-3, 512}};
        RunConfig tref = cfg;
        tref.dt = 1.25e-3 / 64;
        tref.steps = static_cast<std::int64_t>(std::llround(T / *tref.dt));
        const auto tt = convergence_study(cfg, temporal, tref);

        const std::vector<Resolution> spatial{{1e-5, 32}, {1e-5, 64}, {1e-5, 128}, {1e-5, 256}};
        RunConfig sref = cfg;
        sref.J = 2048;
        sref.dt = 1e-5;
        sref.steps = static_cast<std::int64_t>(std::llround(T / 1e-5));
        const auto st = convergence_study(cfg, spatial, sref);
        const double secs = seconds_since(t0);

        std::string detail = "time:";
        bool ok = orders_within(tt, 1.0, 0.15, detail);
        detail += ", space:";
        ok = orders_within(st, 2.0, 0.2, detail) && ok;
        ok = ok && secs <= 60.0 && std::abs(tt.final_time - T) <= 1e-12 &&
             std::abs(st.final_time - T) <= 1e-12;
        return Verdict{ok, detail + ", " + fmt("%.3f s", secs)};
    });

    report(7, "gamma_+ and gamma_- are fixed points of all three steppers", [&] {
        const auto dw = PotentialSpec::double_well();
        const GridSpec g(64, 1.0);
        const SchemeParams s(0.01, 0.5, g);
        double worst = 0.0;
        for (auto kind : {SchemeKind::SemiImplicit, SchemeKind::Explicit, SchemeKind::ConvexSplitting}) {
            for (double c : {1.0, -1.0}) {
                Stepper stepper(kind, dw, g, s);
                FieldState phi{std::vector<double>(64, c)};
                for (int n = 0; n < 1000; ++n) {
                    const auto before = phi.values;
                    stepper.step(phi);
                    for (std::size_t j = 0; j < 64; ++j) {
                        worst = std::max(worst, std::abs(phi.values[j] - before[j]));
                    }
                }
            }
        }
        return Verdict{worst <= 1e-13, "largest per-step change " + fmt("%.3e", worst)};
    });

    report(8, "constant data reduces to the scalar updates (eps = 1e-4)", [&] {
        const auto dw = PotentialSpec::double_well();
        const GridSpec g(64, 1.0);
        const SchemeParams s(1e-4, 0.1, g);
        double worst = 0.0;
        for (double c : {0.5, -0.3, 0.9, 0.0, -0.75}) {
            const FieldState phi{std::vector<double>(64, c)};
            const double linear = c - 0.1 * (c * c * c - c);
            const double split = bisect_cubic(0.1, c + 0.1 * c);
            const auto a = step_semi_implicit(phi, dw, g, s).values;
            const auto b = step_explicit(phi, dw, g, s).values;
            const auto d = step_convex_splitting(phi, dw, g, s).values;
            for (std::size_t j = 0; j < 64; ++j) {
                worst = std::max({worst, std::abs(a[j] - linear), std::abs(b[j] - linear),
                                  std::abs(d[j] - split)});
            }
        }
        return Verdict{worst <= 1e-10, "largest deviation " + fmt("%.3e", worst)};
    });

    report(9, "dt sweep: no violations for dt <= dt_max, report-only above", [&] {
        SweepConfig cfg;
        cfg.base = theorem_run();
        cfg.dt_grid = {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0};
        const auto res = sweep(cfg);
        bool ok = res.rows.size() == 7;
        std::string detail;
        for (const auto& row : res.rows) {
            auto step = [](const std::optional<std::int64_t>& v) {
                return v ? std::to_string(*v) : std::string("none");
            };
            if (row.dt <= 0.5) {
                ok = ok && row.within_bound && !row.first_bound_violation_step &&
                     !row.first_energy_increase_step && !row.error;
            }
            detail += "\n      dt=" + fmt("%g", row.dt) + " within=" + (row.within_bound ? "1" : "0") +
                      " bound_violation=" + step(row.first_bound_violation_step) +
                      " energy_increase=" + step(row.first_energy_increase_step) +
                      " final_energy=" + fmt("%.10g", row.final_energy);
        }
        return Verdict{ok, detail};
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
