#pragma once

#include <filesystem>
#include <iosfwd>

#include "config.hpp"

namespace exinf::app {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2 };

/// Executes one command and writes its artifacts plus `summary.json` into
/// `out_dir` (created if needed). Diagnostics go to `log`.
int run(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// `exinf <command> --config <path> [--out <dir>] [--seed <int>]`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace exinf::app
