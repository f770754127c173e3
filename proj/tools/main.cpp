#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dampstring/commands.hpp"
#include "dampstring/config.hpp"
#include "dampstring/format.hpp"

using namespace dampstring;

int main(int argc, char** argv) {
  CLI::App app{"Damped string spectral verification"};
  std::string command, config_path, out_dir, bc;
  std::uint64_t seed = 0;
  int n_grid = 0;
  bool quiet = false, quick = false;

  std::string help;
  for (const auto& c : command_names()) help += (help.empty() ? "" : " | ") + c;
  app.add_option("command", command, help)->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized checks; replaces the config seeds");
  app.add_option("--n", n_grid, "grid size")->check(CLI::PositiveNumber);
  app.add_option("--bc", bc, "min | max | zero0 | zero1 | omega:RE,IM");
  app.add_flag("--quiet", quiet, "only print the summary line");
  app.add_flag("--quick", quick, "verify-all: skip the large-grid asymptotic runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  VerificationReport report;
  int status = 0;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (n_grid > 0) cfg.n_grid = n_grid;
    if (!bc.empty()) cfg.bc = bc;
    if (*seed_opt) cfg.seeds = {seed};
    if (quick) cfg.quick = true;
    validate_config(cfg);
    status = run_command(command, cfg, report);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (!quiet)
    for (const Record& r : report.records)
      std::cout << status_name(r.status) << "  " << r.name << "  measured=" << fmt_double(r.measured)
                << "  tolerance=" << fmt_double(r.tolerance)
                << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
  std::cout << command << ": " << report.records.size() << " records, "
            << report.count(Status::Pass) << " pass, " << report.count(Status::Fail) << " fail, "
            << report.count(Status::ReportOnly) << " report-only; output in " << cfg.out_dir << '\n';
  return status;
}
