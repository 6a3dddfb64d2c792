#include "phasefield/cli.hpp"

#include "phasefield/config.hpp"
#include "phasefield/errors.hpp"
#include "phasefield/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace phasefield {

namespace fs = std::filesystem;

namespace {

struct Invocation {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

ConfigFile load_config(const Invocation& inv)
{
    auto file = ConfigFile::load(inv.config_path);
    for (const auto& o : inv.overrides) {
        file.apply_override(o);
    }
    return file;
}

fs::path output_dir(const Invocation& inv, const RunConfig& cfg)
{
    fs::path dir = inv.output_dir.empty() ? cfg.output : fs::path(inv.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    writer(out);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
}

int cmd_run(const Invocation& inv, std::ostream& out)
{
    const auto cfg = parse_run_config(load_config(inv));
    const auto result = run(cfg);
    const auto dir = output_dir(inv, cfg);
    write_with(dir / "run.csv", [&](std::ostream& o) { write_run_csv(o, result.records); });
    write_file(dir / "summary.json", run_summary_json(cfg, result.summary) + "\n");

    const auto& s = result.summary;
    out << "steps " << s.steps_taken << ", dt " << format_real(s.dt) << ", energy "
        << format_real(s.initial_energy) << " -> " << format_real(s.final_energy) << ", range ["
        << format_real(s.min_val) << ", " << format_real(s.max_val) << "]\n";
    if (s.diverged_at_step) {
        out << "run diverged at step " << *s.diverged_at_step << "\n";
    }
    if (s.first_violation) {
        out << "VIOLATION: " << s.first_violation->monitor << " at step "
            << s.first_violation->step << "\n";
    }
    out << "wrote " << (dir / "run.csv").string() << "\n";
    return exit_code_for(s);
}

int cmd_sweep(const Invocation& inv, std::ostream& out)
{
    const auto cfg = parse_sweep_config(load_config(inv));
    const auto result = sweep(cfg, default_thread_count());
    const auto dir = output_dir(inv, cfg.base);
    write_with(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, result); });
    write_file(dir / "sweep.json", sweep_summary_json(cfg, result) + "\n");

    write_sweep_csv(out, result);
    for (const auto& row : result.rows) {
        if (row.error) {
            out << "dt " << format_real(row.dt) << ": " << *row.error << "\n";
        }
    }
    if (result.any_active_violation()) {
        out << "VIOLATION: an active monitor failed in a row with dt <= dt_max\n";
    }
    return exit_code_for(result);
}

int cmd_converge(const Invocation& inv, std::ostream& out)
{
    const auto cfg = parse_convergence_config(load_config(inv));
    const auto table = convergence_study(cfg.base, cfg.ladder, cfg.reference);
    const auto dir = output_dir(inv, cfg.base);
    write_with(dir / "convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, table); });
    write_file(dir / "convergence.json", convergence_summary_json(table) + "\n");

    write_convergence_csv(out, table);
    if (!table.all_active_satisfied) {
        out << "VIOLATION: an active monitor failed during the convergence runs\n";
    }
    return exit_code_for(table);
}

int cmd_check(const Invocation& inv, std::ostream& out)
{
    const auto p = parse_potential_config(load_config(inv));
    const auto b = stability_bounds(p);
    const auto r = validate_hypotheses(p);
    auto flag = [](bool v) { return v ? "true" : "false"; };

    out << "potential          = " << to_string(p.kind()) << "\n";
    out << "interval           = [" << format_real(p.gamma_minus()) << ", "
        << format_real(p.gamma_plus()) << "]\n";
    out << "max_fprime         = " << format_real(b.max_fprime) << "\n";
    out << "L                  = " << format_real(b.lipschitz_L) << "\n";
    out << "dt_max             = " << format_real(b.dt_max) << "\n";
    out << "endpoints_vanish   = " << flag(r.endpoints_vanish) << "  (f(g-) = "
        << format_real(r.f_at_gamma_minus) << ", f(g+) = " << format_real(r.f_at_gamma_plus)
        << ")\n";
    out << "f_vanishes_at_zero = " << flag(r.f_vanishes_at_zero) << "  (f(0) = "
        << format_real(r.f_at_zero) << ", 0 strictly inside = " << flag(r.zero_strictly_inside)
        << ")\n";
    return kExitOk;
}

}  // namespace

int exit_code_for(const RunSummary& summary) noexcept
{
    return summary.all_active_satisfied() ? kExitOk : kExitTheoremViolated;
}

int exit_code_for(const SweepResult& result) noexcept
{
    return result.any_active_violation() ? kExitTheoremViolated : kExitOk;
}

int exit_code_for(const ConvergenceTable& table) noexcept
{
    return table.all_active_satisfied ? kExitOk : kExitTheoremViolated;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Semi-implicit Allen-Cahn solver with maximum-principle, L1 and energy monitors",
                 "phasefield"};
    app.require_subcommand(1);

    Invocation inv;
    int (*handler)(const Invocation&, std::ostream&) = nullptr;

    auto add = [&](const char* name, const char* help, int (*fn)(const Invocation&, std::ostream&)) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", inv.config_path, "Configuration file")->required();
        sub->add_option("--set,-s", inv.overrides, "Override a key, e.g. scheme.dt=0.5");
        sub->add_option("--out,-o", inv.output_dir, "Output directory");
        sub->callback([&handler, fn] { handler = fn; });
    };
    add("run", "Integrate one configuration and write run.csv and summary.json", cmd_run);
    add("sweep", "Run a dt sweep and write sweep.csv and sweep.json", cmd_sweep);
    add("converge", "Run a convergence ladder and write convergence.csv", cmd_converge);
    add("check", "Print the stability bounds and hypothesis checks of the potential", cmd_check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        return handler(inv, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace phasefield
