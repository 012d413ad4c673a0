#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvbound/bounds.hpp"
#include "tvbound/table_io.hpp"
#include "tvbound/two_state.hpp"

namespace tvbound {

/// Experiment configs are flat key/value text files: one key per line
/// followed by its value(s), whitespace separated; '#' starts a comment.
/// Grid axes may list several values; the grid is their Cartesian product,
/// expanded in declaration order (first declared axis outermost).
///
/// Common keys:
///   mode            twostate | table | random            (required)
///   output          path of the CSV to write             (required for run)
///   exact_cap       enumeration ceiling (default 10000000)
///   mc_samples      Monte Carlo sample count, 0 disables (default 0)
///   rng_seed        sampler seed (default 1)
///   budget_scope    reachable | all                      (default reachable)
///   budget_override c_0 ... c_n  (optional looser budget; must dominate the
///                   exact per-step TV distances)
///
/// twostate axes: p, eps, delta, n
/// random axes:   states, n, perturb_scale, gen_seed
/// table keys:    nominal <path>, perturbed <path>, optional axis n
enum class ExperimentMode { twostate, table, random };

struct GridAxis {
  std::string name;
  std::vector<double> values;
  bool integral = false;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::twostate;
  std::vector<GridAxis> axes;  // declaration order
  std::string output_path;
  std::size_t exact_cap = kDefaultEnumerationCap;
  std::uint64_t mc_samples = 0;
  std::uint64_t rng_seed = 1;
  BudgetScope budget_scope = BudgetScope::reachable;
  std::vector<double> budget_override;  // empty means tight budgets
  std::string nominal_path;
  std::string perturbed_path;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& label);

/// One grid point of results. Optional fields print as empty CSV cells;
/// doubles print with 17 significant digits.
struct ResultRow {
  std::vector<std::pair<std::string, std::string>> params;
  std::string case_label;  // twostate mode only
  std::optional<double> exact_tv;
  std::optional<double> mc_estimate;
  std::optional<double> mc_half_width;
  double linear_bound = 0.0;
  double multiplicative_bound = 0.0;
  double overlap_lower_bound = 0.0;
  std::optional<double> gap;  // multiplicative_bound - exact_tv
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::string csv;  // full file contents, header included
};

/// Computes every grid row (in grid order) and renders the CSV. Each row with
/// an exact TV is checked against its bounds on the spot, and Monte Carlo
/// estimates are checked against the exact coupled diagonal mass whenever it
/// is affordable; any violation throws. Grid points may be evaluated in
/// parallel (TVBOUND_WORKERS overrides the worker count) without changing
/// the output.
RunResult compute(const ExperimentConfig& config);

/// compute() plus writing the CSV to config.output_path.
std::vector<ResultRow> run(const ExperimentConfig& config);

/// Structural checks over an existing result CSV: numeric cells parse and
/// are finite, bound columns are ordered, the gap column is consistent, and
/// the bound/overlap duality holds. Returns human-readable violations.
std::vector<std::string> verify_report_text(const std::string& csv);
std::vector<std::string> verify_report_file(const std::string& path);

/// Deterministic random chain pair for `random` mode: per-step random
/// rows with a floor away from zero, perturbed by mixing each row with an
/// independent random row at weight `scale`.
std::pair<KernelSequence, KernelSequence> random_chain_pair(
    std::uint32_t states, std::size_t horizon, double scale,
    std::uint64_t seed);

}  // namespace tvbound
