// Command-line front end: run scenarios, check agreement, run the identity suite.
#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "wrelay/cli/runner.hpp"
#include "wrelay/cli/scenario.hpp"
#include "wrelay/specfun/identities.hpp"

namespace {

constexpr int kParseError = 2;
constexpr int kValidationError = 3;
constexpr int kNonConvergence = 4;

int cmd_run(const std::string& path, const wrelay::cli::RunOptions& opt) {
  using namespace wrelay::cli;
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (const wrelay::toml::ParseError& e) {
    std::cerr << path << ": parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const ValidationError& e) {
    std::cerr << path << ": invalid scenario: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kParseError;
  }
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const auto paths = run_scenario(s, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
    std::fprintf(stdout, "%s: %zu file(s) in %.1f s\n", s.name.c_str(), paths.size(), secs);
  } catch (const ValidationError& e) {
    std::cerr << path << ": invalid scenario: " << e.what() << "\n";
    return kValidationError;
  } catch (const PointError& e) {
    std::cerr << path << ": no convergence at " << e.what() << "\n";
    return kNonConvergence;
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  try {
    const auto rep = wrelay::cli::report_agreement(dir);
    std::cout << wrelay::cli::format_report(rep);
    return rep.pass_rate() >= 0.99 ? 0 : 1;
  } catch (const wrelay::cli::ReportError& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kParseError;
  }
}

int cmd_selftest() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = wrelay::specfun::run_identity_suite();
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-4s %-45s points=%d max_rel=%.3e (z=%.4g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.points, c.max_rel_error, c.worst_z);
    ok = ok && c.passed;
  }
  std::printf("%.2f s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop Weibull relay link analysis"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string methods;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  wrelay::cli::RunOptions opt;
  auto* run = app.add_subcommand("run", "Evaluate a scenario and write one CSV per metric");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "Monte-Carlo seed (overrides the file)");
  auto* methods_opt = run->add_option("--methods", methods, "Comma-separated subset of exact,asymptotic,mc");
  auto* trials_opt = run->add_option("--trials", trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
  run->add_option("--threads", opt.threads, "Worker threads for sweep points (0: all cores)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Compare exact and Monte-Carlo columns of the CSVs in a directory");
  report->add_option("dir", report_dir, "Directory with CSV files")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the special-function identity suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParseError;
  }

  if (*run) {
    if (*seed_opt) opt.seed = seed;
    if (*trials_opt) opt.trials = trials;
    if (*methods_opt) {
      try {
        opt.methods = wrelay::cli::parse_methods(methods);
      } catch (const wrelay::cli::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kValidationError;
      }
    }
    return cmd_run(scenario_path, opt);
  }
  if (*report) return cmd_report(report_dir);
  if (*selftest) return cmd_selftest();
  return 0;
}
