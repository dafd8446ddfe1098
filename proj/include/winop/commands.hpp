#pragma once

#include "winop/run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace winop {

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code. Diagnostics go to `err` only.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommands on an already-resolved configuration. Each writes its outputs
// and run_config.json into config.output; evaluate and report print to `out`
// instead when no output directory is given.
void cmd_generate(const RunConfig& config);
void cmd_detect(const RunConfig& config);
void cmd_sweep(const RunConfig& config);
void cmd_evaluate(const RunConfig& config, std::ostream& out);
void cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace winop
