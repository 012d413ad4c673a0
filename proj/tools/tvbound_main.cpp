#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tvbound/experiment.hpp"
#include "tvbound/numeric.hpp"
#include "tvbound/two_state.hpp"

namespace {

int run_command(const std::string& config_path) {
  const tvbound::ExperimentConfig config = tvbound::parse_config(config_path);
  const auto rows = tvbound::run(config);
  std::cout << "wrote " << rows.size() << " rows to " << config.output_path
            << "\n";
  return 0;
}

int verify_command(const std::string& config_path,
                   const std::string& report_path) {
  bool failed = false;
  std::string recomputed_csv;
  if (!config_path.empty()) {
    const tvbound::ExperimentConfig config = tvbound::parse_config(config_path);
    try {
      tvbound::RunResult result = tvbound::compute(config);
      recomputed_csv = std::move(result.csv);
      std::cout << "config check: " << result.rows.size()
                << " rows recomputed, all bounds hold\n";
    } catch (const std::exception& e) {
      std::cerr << "config check failed: " << e.what() << "\n";
      failed = true;
    }
  }
  if (!report_path.empty()) {
    const auto violations = tvbound::verify_report_file(report_path);
    if (violations.empty()) {
      std::cout << "report check: " << report_path << " is consistent\n";
    } else {
      for (const auto& v : violations) {
        std::cerr << "report check failed: " << v << "\n";
      }
      failed = true;
    }
    if (!failed && !recomputed_csv.empty()) {
      std::ifstream in(report_path, std::ios::binary);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      if (buffer.str() != recomputed_csv) {
        std::cerr << "report check failed: " << report_path
                  << " differs from the recomputed results\n";
        failed = true;
      } else {
        std::cout << "report check: " << report_path
                  << " matches the recomputed results byte for byte\n";
      }
    }
  }
  return failed ? 1 : 0;
}

int twostate_command(double p, double eps, double delta, std::uint64_t n,
                     bool as_csv) {
  const tvbound::TwoStateSpec spec(p, eps, delta,
                                   static_cast<std::size_t>(n));
  const tvbound::CaseResult result = tvbound::classify_case(spec);
  const double stay = 1.0 - result.f_n;
  const double linear = 2.0 * (std::abs(delta) + static_cast<double>(n) * eps);
  const double overlap = (1.0 - std::abs(delta)) * stay;

  using tvbound::format_double;
  if (as_csv) {
    std::cout << "p,eps,delta,n,case,exact_tv,linear_bound,"
                 "multiplicative_bound,overlap_lower_bound,gap\n";
    std::cout << format_double(p) << "," << format_double(eps) << ","
              << format_double(delta) << "," << n << ","
              << tvbound::case_label_char(result.label) << ","
              << format_double(result.exact_tv) << "," << format_double(linear)
              << "," << format_double(result.bound) << ","
              << format_double(overlap) << ","
              << format_double(result.bound - result.exact_tv) << "\n";
    return 0;
  }
  std::cout << "case:                 " << tvbound::case_label_char(result.label)
            << "\n";
  std::cout << "f_n = 1-(1-eps)^n:    " << format_double(result.f_n) << "\n";
  std::cout << "exact TV:             " << format_double(result.exact_tv)
            << "\n";
  std::cout << "multiplicative bound: " << format_double(result.bound) << "\n";
  std::cout << "linear bound:         " << format_double(linear) << "\n";
  std::cout << "overlap lower bound:  " << format_double(overlap) << "\n";
  std::cout << "gap:                  "
            << format_double(result.bound - result.exact_tv) << "\n";
  if (p > 0.0 && p < 1.0) {
    std::cout << "regime-B threshold N: "
              << tvbound::case_b_threshold(p, eps, delta) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tvbound: exact total-variation perturbation bounds for finite "
      "kernel chains"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand(
      "run", "evaluate a config grid and write the result CSV");
  run->add_option("--config", run_config, "experiment config file")
      ->required();

  std::string verify_config;
  std::string verify_report;
  auto* verify = app.add_subcommand(
      "verify",
      "recompute a config and/or check an existing result CSV; exits "
      "nonzero on any violation");
  verify->add_option("--config", verify_config, "experiment config file");
  verify->add_option("--report", verify_report, "result CSV to check");

  double p = 0.5;
  double eps = 0.1;
  double delta = 0.0;
  std::uint64_t n = 1;
  bool as_csv = false;
  auto* twostate = app.add_subcommand(
      "twostate", "closed-form report for one two-state instance");
  twostate->add_option("--p", p, "initial probability of state 1")->required();
  twostate->add_option("--eps", eps, "flip probability in (0,1)")->required();
  twostate->add_option("--delta", delta, "initial perturbation in (p-1,p)")
      ->required();
  twostate->add_option("--n", n, "horizon")->required();
  twostate->add_flag("--csv", as_csv, "emit a CSV row instead of a report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_config);
    if (verify->parsed()) {
      if (verify_config.empty() && verify_report.empty()) {
        std::cerr << "verify: need --config and/or --report\n";
        return 2;
      }
      return verify_command(verify_config, verify_report);
    }
    if (twostate->parsed()) return twostate_command(p, eps, delta, n, as_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
