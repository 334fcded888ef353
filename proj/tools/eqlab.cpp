#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/experiment.hpp"

namespace {

// Exit codes: 0 all checks pass, 1 a check failed, 2 bad usage or config,
// 3 a module error during the run, 4 the report could not be written.
constexpr int kChecksFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRunError = 3;
constexpr int kWriteError = 4;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out;
  bool no_plots = false;
};

int execute(eqlab::Subcommand sub, const Options& opt) {
  eqlab::ExperimentConfig cfg;
  try {
    cfg = eqlab::load_config(sub, opt.config, opt.seed, opt.workers);
  } catch (const eqlab::SchemaError& e) {
    std::cerr << "eqlab: " << e.what() << "\n";
    return kConfigError;
  }
  eqlab::ExperimentReport report;
  try {
    report = eqlab::run_experiment(cfg);
  } catch (const eqlab::SchemaError& e) {
    std::cerr << "eqlab: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "eqlab " << eqlab::to_string(sub) << ": " << e.what() << "\n";
    return kRunError;
  }
  report.notes["config_file"] = std::filesystem::absolute(opt.config).string();

  const std::filesystem::path out = opt.out.empty() ? "eqlab-" + eqlab::to_string(sub) : opt.out;
  try {
    eqlab::write_report(report, out, !opt.no_plots);
  } catch (const std::exception& e) {
    std::cerr << "eqlab: " << e.what() << "\n";
    return kWriteError;
  }

  for (const eqlab::Check& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  std::printf("wrote %zu tables to %s in %.2f s\n", report.tables.size(), out.string().c_str(), report.wall_seconds);
  return report.all_pass() ? 0 : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact experiments on equidistribution in complex dynamics"};
  app.set_version_flag("--version", std::string(EQLAB_VERSION));
  app.require_subcommand(1);

  Options opt;
  for (const char* name : {"sections", "dynamics", "henon", "potential", "constants"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", opt.config, "JSON parameter file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "64-bit master seed")->required();
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::Range(1, 4096));
    sub->add_option("--out", opt.out, "output directory (default eqlab-<subcommand>)");
    sub->add_flag("--no-plots", opt.no_plots, "skip SVG plots");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  const auto chosen = app.get_subcommands();
  return execute(eqlab::subcommand_from_string(chosen.front()->get_name()), opt);
}
