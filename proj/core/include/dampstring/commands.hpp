#pragma once

#include <string>
#include <vector>

#include "dampstring/config.hpp"
#include "dampstring/report.hpp"

namespace dampstring {

const std::vector<std::string>& command_names();

// Runs one command, writes its data files and report.{json,csv} under
// cfg.out_dir, and returns 0 when no hard check failed, 1 otherwise.
// Unknown commands and bad configs throw ConfigError.
int run_command(const std::string& cmd, const RunConfig& cfg, VerificationReport& report);

// The individual suites, without file output.
struct CommandContext {
  RunConfig cfg;
  ResolvedProblem problem;
  std::string out_dir;  // empty: write nothing
};

void spectrum_suite(const CommandContext& ctx, VerificationReport& report);
void greens_suite(const CommandContext& ctx, VerificationReport& report);
void trace_suite(const CommandContext& ctx, VerificationReport& report);
void resolvent_suite(const CommandContext& ctx, VerificationReport& report);
void susy_suite(const CommandContext& ctx, VerificationReport& report);
void asymptotics_suite(const CommandContext& ctx, VerificationReport& report);
void riesz_suite(const CommandContext& ctx, VerificationReport& report);
// Kernel census and seeded random-coefficient sweeps.
void sweep_suite(const CommandContext& ctx, VerificationReport& report);

} // namespace dampstring
