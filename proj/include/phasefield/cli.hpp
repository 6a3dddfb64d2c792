#pragma once

#include "phasefield/experiment.hpp"

#include <iosfwd>

namespace phasefield {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,             // configuration, parse or I/O failure
    kExitTheoremViolated = 2,   // an active monitor failed under its hypotheses
};

int exit_code_for(const RunSummary& summary) noexcept;
int exit_code_for(const SweepResult& result) noexcept;
int exit_code_for(const ConvergenceTable& table) noexcept;

/// `phasefield run|sweep|converge|check --config <path> [--set key=value]... [--out <dir>]`
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phasefield
