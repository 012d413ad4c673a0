#include "tvbound/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tvbound/coupling.hpp"
#include "tvbound/numeric.hpp"
#include "tvbound/rng.hpp"

namespace tvbound {

namespace {

constexpr const char* kTailColumns[] = {
    "exact_tv",           "mc_estimate",        "mc_half_width",
    "linear_bound",       "multiplicative_bound", "overlap_lower_bound",
    "gap"};

double parse_double_token(const std::string& token, const std::string& where) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw std::runtime_error(where + ": cannot parse number '" + token + "'");
  }
  return value;
}

std::uint64_t parse_uint_token(const std::string& token,
                               const std::string& where) {
  std::uint64_t value = 0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw std::runtime_error(where + ": cannot parse integer '" + token + "'");
  }
  return value;
}

struct AxisSpec {
  const char* name;
  bool integral;
  bool required;
};

std::vector<AxisSpec> axis_specs(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::twostate:
      return {{"p", false, true},
              {"eps", false, true},
              {"delta", false, true},
              {"n", true, true}};
    case ExperimentMode::random:
      return {{"states", true, true},
              {"n", true, true},
              {"perturb_scale", false, true},
              {"gen_seed", true, true}};
    case ExperimentMode::table:
      return {{"n", true, false}};
  }
  return {};
}

std::string format_param(double value, bool integral) {
  if (integral) return std::to_string(static_cast<long long>(std::llround(value)));
  return format_double(value);
}

std::string optional_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

// Enumeration is affordable when the full product-space size stays under cap.
bool enumeration_affordable(const KernelSequence& seq, std::size_t horizon,
                            std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t k = 0; k <= horizon; ++k) {
    const std::size_t s = seq.component_space(k).size();
    if (total > cap / s) return false;
    total *= s;
  }
  return true;
}

void apply_budget_override(ResultRow& row, const ExperimentConfig& cfg,
                           std::span<const double> tight,
                           const std::string& where) {
  if (cfg.budget_override.empty()) return;
  if (cfg.budget_override.size() != tight.size()) {
    throw std::runtime_error(
        where + ": budget_override needs " + std::to_string(tight.size()) +
        " constants for this horizon, got " +
        std::to_string(cfg.budget_override.size()));
  }
  for (std::size_t k = 0; k < tight.size(); ++k) {
    if (cfg.budget_override[k] < tight[k] - kExactTol) {
      throw std::runtime_error(
          where + ": budget_override constant " + std::to_string(k) + " (" +
          format_double(cfg.budget_override[k]) +
          ") does not dominate the exact step TV " + format_double(tight[k]));
    }
  }
  PerturbationBudget budget(cfg.budget_override);
  row.linear_bound = linear_bound(budget);
  row.multiplicative_bound = multiplicative_bound(budget);
  std::vector<double> overlaps;
  overlaps.reserve(budget.size());
  for (double c : budget.constants()) overlaps.push_back(1.0 - 0.5 * c);
  row.overlap_lower_bound = overlap_lower_bound(overlaps);
  if (row.exact_tv) row.gap = row.multiplicative_bound - *row.exact_tv;
}

void check_row_invariants(const ResultRow& row, const std::string& where) {
  if (row.gap && *row.gap < -kExactTol) {
    throw std::runtime_error(where + ": exact TV " +
                             format_double(*row.exact_tv) +
                             " exceeds the multiplicative bound " +
                             format_double(row.multiplicative_bound));
  }
  if (row.multiplicative_bound > row.linear_bound + kExactTol) {
    throw std::runtime_error(where +
                             ": multiplicative bound exceeds the linear bound");
  }
}

void run_monte_carlo(ResultRow& row, const ExperimentConfig& cfg,
                     const KernelSequence& seq, const KernelSequence& seq_alt,
                     std::size_t horizon, std::uint64_t row_index,
                     const std::string& where) {
  if (cfg.mc_samples == 0) return;
  const std::uint64_t seed = substream_seed(cfg.rng_seed, row_index);
  const McEstimate est =
      coupled_sampler(seq, seq_alt, horizon, cfg.mc_samples, seed);
  row.mc_estimate = est.estimate;
  row.mc_half_width = est.half_width;
  if (enumeration_affordable(seq, horizon, cfg.exact_cap)) {
    const double diag =
        coupled_diagonal_mass(seq, seq_alt, horizon, cfg.exact_cap);
    // At p_hat in {0, 1} the plug-in half-width degenerates to zero; widen
    // with the CI at the exact value so the comparison stays meaningful.
    const double hw_eff = std::max(
        est.half_width,
        std::sqrt(diag * (1.0 - diag) / static_cast<double>(est.samples)));
    if (std::abs(est.estimate - diag) > 3.0 * hw_eff + kExactTol) {
      throw std::runtime_error(
          where + ": Monte Carlo estimate " + format_double(est.estimate) +
          " deviates from the exact coupled diagonal mass " +
          format_double(diag) + " by more than three half-widths");
    }
  }
}

ResultRow compute_twostate_row(const ExperimentConfig& cfg,
                               const std::map<std::string, double>& point,
                               std::uint64_t row_index,
                               const std::string& where) {
  const double p = point.at("p");
  const double eps = point.at("eps");
  const double delta = point.at("delta");
  const auto n = static_cast<std::size_t>(std::llround(point.at("n")));

  const TwoStateSpec spec(p, eps, delta, n);
  const CaseResult result = classify_case(spec);

  ResultRow row;
  row.case_label = std::string(1, case_label_char(result.label));
  row.exact_tv = result.exact_tv;
  const double adelta = std::abs(delta);
  const double stay = std::pow(1.0 - eps, static_cast<double>(n));
  row.linear_bound = 2.0 * (adelta + static_cast<double>(n) * eps);
  row.multiplicative_bound = result.bound;
  row.overlap_lower_bound = (1.0 - adelta) * stay;
  row.gap = row.multiplicative_bound - *row.exact_tv;

  // chains are only materialized when something needs them
  std::size_t enum_bound = 1;
  for (std::size_t k = 0; k <= n && enum_bound <= cfg.exact_cap; ++k) {
    enum_bound *= 2;
  }
  const bool affordable = enum_bound <= cfg.exact_cap;
  if (affordable || cfg.mc_samples > 0) {
    auto [seq, seq_alt] = build_chain(spec);
    if (affordable) {
      // the analytic formula and the enumerated chain must agree exactly
      ReportOptions options;
      options.exact = true;
      options.enumeration_cap = cfg.exact_cap;
      options.scope = cfg.budget_scope;
      const BoundReport report = make_report(seq, seq_alt, n, options);
      if (std::abs(*report.exact_tv - result.exact_tv) > kExactTol) {
        throw std::runtime_error(
            where + ": enumerated TV " + format_double(*report.exact_tv) +
            " disagrees with the closed form " +
            format_double(result.exact_tv));
      }
      if (std::abs(report.multiplicative - result.bound) > 1e-9) {
        throw std::runtime_error(
            where + ": kernel-scan multiplicative bound disagrees with the "
                    "closed form");
      }
    }
    run_monte_carlo(row, cfg, seq, seq_alt, n, row_index, where);
  }

  std::vector<double> tight;
  tight.reserve(n + 1);
  tight.push_back(2.0 * adelta);
  for (std::size_t k = 0; k < n; ++k) tight.push_back(2.0 * eps);
  apply_budget_override(row, cfg, tight, where);
  check_row_invariants(row, where);
  return row;
}

ResultRow compute_chain_row(const ExperimentConfig& cfg,
                            const KernelSequence& seq,
                            const KernelSequence& seq_alt, std::size_t horizon,
                            std::uint64_t row_index, const std::string& where) {
  if (horizon > seq.step_count()) {
    throw std::runtime_error(where + ": horizon " + std::to_string(horizon) +
                             " exceeds the " +
                             std::to_string(seq.step_count()) +
                             " steps of the loaded chain");
  }
  ReportOptions options;
  options.exact = enumeration_affordable(seq, horizon, cfg.exact_cap);
  options.enumeration_cap = cfg.exact_cap;
  options.scope = cfg.budget_scope;
  const BoundReport report = make_report(seq, seq_alt, horizon, options);

  ResultRow row;
  row.exact_tv = report.exact_tv;
  row.linear_bound = report.linear;
  row.multiplicative_bound = report.multiplicative;
  row.overlap_lower_bound = report.overlap_lower;
  if (row.exact_tv) row.gap = row.multiplicative_bound - *row.exact_tv;

  apply_budget_override(row, cfg, report.budgets.constants(), where);
  check_row_invariants(row, where);
  run_monte_carlo(row, cfg, seq, seq_alt, horizon, row_index, where);
  return row;
}

std::size_t worker_count(std::size_t rows) {
  if (const char* env = std::getenv("TVBOUND_WORKERS")) {
    const std::string value(env);
    const std::uint64_t parsed = parse_uint_token(value, "TVBOUND_WORKERS");
    return std::max<std::size_t>(1, static_cast<std::size_t>(parsed));
  }
  const std::size_t hw = std::thread::hardware_concurrency();
  return std::clamp<std::size_t>(hw == 0 ? 1 : hw, 1,
                                 std::max<std::size_t>(rows, 1));
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& label) {
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream split(line);
    std::string key;
    if (!(split >> key) || key.front() == '#') continue;
    std::vector<std::string> values;
    std::string tok;
    while (split >> tok) {
      if (tok.front() == '#') break;
      values.push_back(tok);
    }
    if (values.empty()) {
      throw std::runtime_error(label + ":" + std::to_string(line_number) +
                               ": key '" + key + "' has no value");
    }
    entries.emplace_back(std::move(key), std::move(values));
  }

  std::set<std::string> seen;
  for (const auto& [key, values] : entries) {
    (void)values;
    if (!seen.insert(key).second) {
      throw std::runtime_error(label + ": duplicate key '" + key + "'");
    }
  }

  auto find = [&](const std::string& key)
      -> const std::vector<std::string>* {
    for (const auto& [k, v] : entries) {
      if (k == key) return &v;
    }
    return nullptr;
  };
  auto single = [&](const std::string& key) -> const std::string& {
    const auto* values = find(key);
    if (values->size() != 1) {
      throw std::runtime_error(label + ": key '" + key +
                               "' expects a single value");
    }
    return values->front();
  };

  ExperimentConfig config;
  const auto* mode = find("mode");
  if (!mode) throw std::runtime_error(label + ": missing 'mode'");
  const std::string& mode_name = single("mode");
  if (mode_name == "twostate") {
    config.mode = ExperimentMode::twostate;
  } else if (mode_name == "table") {
    config.mode = ExperimentMode::table;
  } else if (mode_name == "random") {
    config.mode = ExperimentMode::random;
  } else {
    throw std::runtime_error(label + ": unknown mode '" + mode_name + "'");
  }

  const auto specs = axis_specs(config.mode);
  std::set<std::string> known{"mode",       "output",     "exact_cap",
                              "mc_samples", "rng_seed",   "budget_scope",
                              "budget_override"};
  for (const auto& spec : specs) known.insert(spec.name);
  if (config.mode == ExperimentMode::table) {
    known.insert("nominal");
    known.insert("perturbed");
  }
  for (const auto& [key, values] : entries) {
    (void)values;
    if (!known.contains(key)) {
      throw std::runtime_error(label + ": unknown key '" + key +
                               "' for mode '" + mode_name + "'");
    }
  }

  // axes in declaration order
  for (const auto& [key, values] : entries) {
    const auto spec = std::find_if(specs.begin(), specs.end(),
                                   [&](const AxisSpec& s) { return key == s.name; });
    if (spec == specs.end()) continue;
    GridAxis axis;
    axis.name = key;
    axis.integral = spec->integral;
    for (const auto& tok : values) {
      const double v = parse_double_token(tok, label + ": axis '" + key + "'");
      if (spec->integral &&
          (v < 0.0 || v != std::floor(v))) {
        throw std::runtime_error(label + ": axis '" + key +
                                 "' needs nonnegative integers, got '" + tok +
                                 "'");
      }
      axis.values.push_back(v);
    }
    config.axes.push_back(std::move(axis));
  }
  for (const auto& spec : specs) {
    if (!spec.required) continue;
    if (std::none_of(config.axes.begin(), config.axes.end(),
                     [&](const GridAxis& a) { return a.name == spec.name; })) {
      throw std::runtime_error(label + ": mode '" + mode_name +
                               "' requires axis '" + spec.name + "'");
    }
  }

  if (find("output")) config.output_path = single("output");
  if (find("exact_cap")) {
    config.exact_cap = static_cast<std::size_t>(
        parse_uint_token(single("exact_cap"), label + ": exact_cap"));
    if (config.exact_cap == 0) {
      throw std::runtime_error(label + ": exact_cap must be at least 1");
    }
  }
  if (find("mc_samples")) {
    config.mc_samples =
        parse_uint_token(single("mc_samples"), label + ": mc_samples");
  }
  if (find("rng_seed")) {
    config.rng_seed = parse_uint_token(single("rng_seed"), label + ": rng_seed");
  }
  if (find("budget_scope")) {
    const std::string& scope = single("budget_scope");
    if (scope == "reachable") {
      config.budget_scope = BudgetScope::reachable;
    } else if (scope == "all") {
      config.budget_scope = BudgetScope::all;
    } else {
      throw std::runtime_error(label + ": unknown budget_scope '" + scope +
                               "'");
    }
  }
  if (const auto* override_values = find("budget_override")) {
    for (const auto& tok : *override_values) {
      config.budget_override.push_back(
          parse_double_token(tok, label + ": budget_override"));
    }
  }
  if (config.mode == ExperimentMode::table) {
    if (!find("nominal") || !find("perturbed")) {
      throw std::runtime_error(
          label + ": table mode requires 'nominal' and 'perturbed' paths");
    }
    config.nominal_path = single("nominal");
    config.perturbed_path = single("perturbed");
  }
  if (config.mode == ExperimentMode::random) {
    for (const auto& axis : config.axes) {
      if (axis.name == "perturb_scale") {
        for (double v : axis.values) {
          if (v < 0.0 || v > 1.0) {
            throw std::runtime_error(
                label + ": perturb_scale values must lie in [0, 1]");
          }
        }
      }
      if (axis.name == "states") {
        for (double v : axis.values) {
          if (v < 1.0) {
            throw std::runtime_error(label + ": states must be at least 1");
          }
        }
      }
    }
  }
  return config;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config '" + path + "'");
  }
  return parse_config(in, path);
}

std::pair<KernelSequence, KernelSequence> random_chain_pair(
    std::uint32_t states, std::size_t horizon, double scale,
    std::uint64_t seed) {
  if (states == 0) {
    throw std::invalid_argument("random_chain_pair: need at least one state");
  }
  if (!(scale >= 0.0 && scale <= 1.0)) {
    throw std::invalid_argument(
        "random_chain_pair: scale must lie in [0, 1]");
  }
  std::mt19937_64 rng(splitmix64(seed));
  const AtomSpace space = AtomSpace::range(states);

  auto fresh_weights = [&]() {
    std::vector<double> w(states);
    for (double& v : w) v = 0.05 + 0.95 * unit_double(rng());
    return w;
  };
  auto perturbed_weights = [&](const ProbMeasure& base) {
    std::vector<double> noise = fresh_weights();
    const double noise_mass = sum(noise);
    std::vector<double> w(states);
    for (std::uint32_t i = 0; i < states; ++i) {
      w[i] = (1.0 - scale) * base.weight(i) + scale * noise[i] / noise_mass;
    }
    return w;
  };

  ProbMeasure initial = ProbMeasure::normalized(space, fresh_weights());
  ProbMeasure initial_alt =
      ProbMeasure::normalized(space, perturbed_weights(initial));

  std::vector<KernelStep> steps;
  std::vector<KernelStep> steps_alt;
  for (std::size_t k = 0; k < horizon; ++k) {
    std::vector<ProbMeasure> rows;
    std::vector<ProbMeasure> rows_alt;
    for (std::uint32_t x = 0; x < states; ++x) {
      rows.push_back(ProbMeasure::normalized(space, fresh_weights()));
      rows_alt.push_back(
          ProbMeasure::normalized(space, perturbed_weights(rows.back())));
    }
    steps.push_back(KernelStep{FiniteKernel(space, space, std::move(rows)),
                               StepKind::markov});
    steps_alt.push_back(KernelStep{
        FiniteKernel(space, space, std::move(rows_alt)), StepKind::markov});
  }
  return {KernelSequence(std::move(initial), std::move(steps)),
          KernelSequence(std::move(initial_alt), std::move(steps_alt))};
}

RunResult compute(const ExperimentConfig& config) {
  std::size_t grid_size = 1;
  for (const auto& axis : config.axes) {
    if (axis.values.empty()) {
      throw std::runtime_error("config: axis '" + axis.name + "' is empty");
    }
    grid_size *= axis.values.size();
  }
  if (grid_size == 0) throw std::runtime_error("config: empty grid");

  // table-mode chains are loaded once and shared read-only
  std::optional<std::pair<KernelSequence, KernelSequence>> tables;
  if (config.mode == ExperimentMode::table) {
    tables = load_table_chain(config.nominal_path, config.perturbed_path);
  }

  auto point_of = [&](std::size_t row_index) {
    std::map<std::string, double> point;
    std::vector<std::pair<std::string, std::string>> params;
    std::size_t rest = row_index;
    std::size_t stride = grid_size;
    for (const auto& axis : config.axes) {
      stride /= axis.values.size();
      const std::size_t idx = rest / stride;
      rest %= stride;
      point[axis.name] = axis.values[idx];
      params.emplace_back(axis.name,
                          format_param(axis.values[idx], axis.integral));
    }
    return std::make_pair(point, params);
  };

  auto compute_one = [&](std::size_t row_index) {
    const std::string where = "row " + std::to_string(row_index);
    auto [point, params] = point_of(row_index);
    ResultRow row;
    switch (config.mode) {
      case ExperimentMode::twostate:
        row = compute_twostate_row(config, point, row_index, where);
        break;
      case ExperimentMode::table: {
        const std::size_t horizon =
            point.contains("n")
                ? static_cast<std::size_t>(std::llround(point.at("n")))
                : tables->first.step_count();
        row = compute_chain_row(config, tables->first, tables->second, horizon,
                                row_index, where);
        break;
      }
      case ExperimentMode::random: {
        const auto states =
            static_cast<std::uint32_t>(std::llround(point.at("states")));
        const auto horizon =
            static_cast<std::size_t>(std::llround(point.at("n")));
        const auto gen_seed =
            static_cast<std::uint64_t>(std::llround(point.at("gen_seed")));
        const auto chains = random_chain_pair(
            states, horizon, point.at("perturb_scale"), gen_seed);
        row = compute_chain_row(config, chains.first, chains.second, horizon,
                                row_index, where);
        break;
      }
    }
    row.params = std::move(params);
    return row;
  };

  std::vector<ResultRow> rows(grid_size);
  const std::size_t workers = std::min(worker_count(grid_size), grid_size);
  if (workers <= 1) {
    for (std::size_t i = 0; i < grid_size; ++i) rows[i] = compute_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= grid_size) return;
        try {
          rows[i] = compute_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // render (rows already in grid order regardless of scheduling)
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += ",";
      line += cells[i];
    }
    line += "\n";
    return line;
  };

  std::vector<std::string> header;
  for (const auto& axis : config.axes) header.push_back(axis.name);
  if (config.mode == ExperimentMode::twostate) header.push_back("case");
  for (const char* column : kTailColumns) header.emplace_back(column);

  std::string csv = join(header);
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& [name, value] : row.params) {
      (void)name;
      cells.push_back(value);
    }
    if (config.mode == ExperimentMode::twostate) {
      cells.push_back(row.case_label);
    }
    cells.push_back(optional_cell(row.exact_tv));
    cells.push_back(optional_cell(row.mc_estimate));
    cells.push_back(optional_cell(row.mc_half_width));
    cells.push_back(format_double(row.linear_bound));
    cells.push_back(format_double(row.multiplicative_bound));
    cells.push_back(format_double(row.overlap_lower_bound));
    cells.push_back(optional_cell(row.gap));
    csv += join(cells);
  }
  return RunResult{std::move(rows), std::move(csv)};
}

std::vector<ResultRow> run(const ExperimentConfig& config) {
  if (config.output_path.empty()) {
    throw std::runtime_error("config: 'output' path is required to run");
  }
  RunResult result = compute(config);
  std::ofstream out(config.output_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output '" + config.output_path +
                             "'");
  }
  out << result.csv;
  return std::move(result.rows);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

std::vector<std::string> verify_report_text(const std::string& csv) {
  std::vector<std::string> violations;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    return {"report is empty"};
  }
  const std::vector<std::string> header = split_csv_line(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required :
       {"exact_tv", "linear_bound", "multiplicative_bound",
        "overlap_lower_bound", "gap"}) {
    if (!column.contains(required)) {
      return {std::string("missing column '") + required + "'"};
    }
  }

  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_number;
    const std::string where = "row " + std::to_string(row_number);
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      violations.push_back(where + ": expected " +
                           std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
      continue;
    }
    auto cell = [&](const char* name) -> std::optional<double> {
      const auto it = column.find(name);
      if (it == column.end()) return std::nullopt;
      const std::string& text = cells[it->second];
      if (text.empty()) return std::nullopt;
      double value = 0.0;
      const auto res =
          std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
          !std::isfinite(value)) {
        violations.push_back(where + ": cell '" + std::string(name) +
                             "' is not a finite number: '" + text + "'");
        return std::nullopt;
      }
      return value;
    };

    const auto linear = cell("linear_bound");
    const auto mult = cell("multiplicative_bound");
    const auto overlap = cell("overlap_lower_bound");
    const auto exact = cell("exact_tv");
    const auto gap = cell("gap");
    const auto mc = cell("mc_estimate");
    const auto hw = cell("mc_half_width");
    if (!linear || !mult || !overlap) {
      violations.push_back(where + ": bound columns must be present");
      continue;
    }
    if (*mult > *linear + kExactTol) {
      violations.push_back(where + ": multiplicative bound exceeds linear");
    }
    if (*mult > 2.0 + kExactTol || *mult < -kExactTol) {
      violations.push_back(where + ": multiplicative bound outside [0, 2]");
    }
    if (*overlap < -kExactTol || *overlap > 1.0 + kExactTol) {
      violations.push_back(where + ": overlap bound outside [0, 1]");
    }
    if (std::abs(*mult - (2.0 - 2.0 * *overlap)) > 1e-6) {
      violations.push_back(
          where + ": multiplicative bound and overlap bound are inconsistent");
    }
    if (exact) {
      if (*exact < -kExactTol || *exact > 2.0 + kExactTol) {
        violations.push_back(where + ": exact TV outside [0, 2]");
      }
      if (*exact > *mult + kExactTol) {
        violations.push_back(where +
                             ": exact TV exceeds the multiplicative bound");
      }
      if (!gap) {
        violations.push_back(where + ": gap missing despite exact TV");
      } else {
        if (std::abs(*gap - (*mult - *exact)) > 1e-9) {
          violations.push_back(where + ": gap column is inconsistent");
        }
        if (*gap < -kExactTol) {
          violations.push_back(where + ": negative gap");
        }
      }
    }
    if (mc) {
      if (!hw) {
        violations.push_back(where + ": mc_estimate without mc_half_width");
      }
      if (*mc < -kExactTol || *mc > 1.0 + kExactTol) {
        violations.push_back(where + ": Monte Carlo estimate outside [0, 1]");
      }
    }
    const auto case_it = column.find("case");
    if (case_it != column.end()) {
      const std::string& label = cells[case_it->second];
      if (!label.empty() && label != "A" && label != "B" && label != "C") {
        violations.push_back(where + ": unknown case label '" + label + "'");
      }
    }
  }
  if (row_number == 0) violations.push_back("report has no data rows");
  return violations;
}

std::vector<std::string> verify_report_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return {"cannot open report '" + path + "'"};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return verify_report_text(buffer.str());
}

}  // namespace tvbound
