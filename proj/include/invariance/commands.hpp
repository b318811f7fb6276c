#pragma once

#include "invariance/config.hpp"
#include "invariance/criterion.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace invariance {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitViolated = 2,       // not parabolic / NotInvariant / NecessaryViolated
    kExitInconclusive = 3,
    kExitUnstable = 4,       // stability gate rejected the time step
    kExitNoWitness = 5,      // falsifier budget exhausted
    kExitInternalError = 6,  // structural and generic criteria disagree
};

int exit_code(Status status);

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

int cmd_parabolicity(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_check(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_falsify(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Full command line front end: `invcheck <subcommand> --config <path> [--out <dir>]
/// [--seed <u64>] [--tol <real>]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invariance
