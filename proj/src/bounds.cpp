#include "tvbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvbound/numeric.hpp"

namespace tvbound {

namespace {

// Per-step TV sup and overlap inf over a set of histories, scanned together.
struct StepStats {
  double tv_sup = 0.0;
  double overlap_inf = 1.0;

  void absorb(const ProbMeasure& row, const ProbMeasure& row_alt) {
    tv_sup = std::max(tv_sup, tv_norm(row - row_alt));
    overlap_inf = std::min(overlap_inf, meet_mass(row, row_alt));
  }
};

}  // namespace

PerturbationBudget::PerturbationBudget(std::vector<double> constants)
    : constants_(std::move(constants)) {
  if (constants_.empty()) {
    throw std::invalid_argument("PerturbationBudget: empty budget");
  }
  for (double& c : constants_) {
    if (!std::isfinite(c) || c < -kWeightDustTol || c > 2.0 + kWeightDustTol) {
      throw std::invalid_argument("PerturbationBudget: constant " +
                                  format_double(c) + " outside [0, 2]");
    }
    c = std::clamp(c, 0.0, 2.0);
  }
}

double linear_bound(const PerturbationBudget& budget) {
  return sum(budget.constants());
}

double multiplicative_bound(const PerturbationBudget& budget) {
  double prod = 1.0;
  for (double c : budget.constants()) prod *= 1.0 - 0.5 * c;
  return 2.0 - 2.0 * prod;
}

double overlap_lower_bound(std::span<const double> overlaps) {
  double prod = 1.0;
  for (double a : overlaps) {
    if (!std::isfinite(a) || a < -kWeightDustTol || a > 1.0 + kWeightDustTol) {
      throw std::invalid_argument("overlap_lower_bound: overlap " +
                                  format_double(a) + " outside [0, 1]");
    }
    prod *= std::clamp(a, 0.0, 1.0);
  }
  return prod;
}

BoundComparison bound_comparison_check(const PerturbationBudget& budget) {
  return BoundComparison{multiplicative_bound(budget), linear_bound(budget)};
}

BoundReport::BoundReport(std::size_t horizon, std::optional<double> exact_tv,
                         double linear, double multiplicative,
                         double overlap_lower, PerturbationBudget budgets)
    : horizon(horizon), exact_tv(exact_tv), linear(linear),
      multiplicative(multiplicative), overlap_lower(overlap_lower),
      budgets(std::move(budgets)) {
  if (multiplicative > linear + kExactTol) {
    throw std::logic_error("BoundReport: multiplicative bound " +
                           format_double(multiplicative) +
                           " exceeds linear bound " + format_double(linear));
  }
  if (exact_tv && *exact_tv > multiplicative + kExactTol) {
    throw std::logic_error("BoundReport: exact TV " +
                           format_double(*exact_tv) +
                           " exceeds multiplicative bound " +
                           format_double(multiplicative));
  }
}

BoundReport make_report(const KernelSequence& seq,
                        const KernelSequence& seq_alt, std::size_t horizon,
                        const ReportOptions& options) {
  if (horizon > seq.step_count() || horizon > seq_alt.step_count()) {
    throw std::invalid_argument(
        "make_report: horizon exceeds the available kernels");
  }
  if (!compatible(seq, seq_alt, horizon)) {
    throw std::invalid_argument(
        "make_report: sequences are incompatible at this horizon");
  }

  std::vector<double> budgets;
  std::vector<double> overlaps;
  budgets.reserve(horizon + 1);
  overlaps.reserve(horizon + 1);
  budgets.push_back(tv_norm(seq.initial() - seq_alt.initial()));
  overlaps.push_back(meet_mass(seq.initial(), seq_alt.initial()));

  // Reachable-scope scans track either the set of reachable last states
  // (while every step so far is markov on both sides) or the explicit list
  // of reachable history tuples once a full-history step appears.
  const std::size_t state_cap = options.enumeration_cap;
  std::vector<bool> reachable_states;
  std::vector<std::uint32_t> history_tuples;  // flattened, arity = k
  bool tracking_states = true;
  if (options.scope == BudgetScope::reachable) {
    const std::size_t s0 = seq.component_space(0).size();
    reachable_states.assign(s0, false);
    for (std::uint32_t x = 0; x < s0; ++x) {
      if (seq.initial().weight(x) > 0.0 || seq_alt.initial().weight(x) > 0.0) {
        reachable_states[x] = true;
      }
    }
  }

  for (std::size_t k = 1; k <= horizon; ++k) {
    const bool markov_step = seq.step(k).kind == StepKind::markov &&
                             seq_alt.step(k).kind == StepKind::markov;
    StepStats stats;

    if (options.scope == BudgetScope::all) {
      if (markov_step) {
        const std::size_t states = seq.component_space(k - 1).size();
        for (std::uint32_t x = 0; x < states; ++x) {
          stats.absorb(seq.step(k).kernel.row(x), seq_alt.step(k).kernel.row(x));
        }
      } else {
        // at least one explicit history table exists, so this size is the
        // size of a kernel someone already materialized
        std::size_t histories = 1;
        for (std::size_t i = 0; i < k; ++i) {
          histories *= seq.component_space(i).size();
        }
        std::vector<std::uint32_t> tuple(k, 0);
        for (std::size_t flat = 0; flat < histories; ++flat) {
          stats.absorb(seq.row_for_history(k, tuple),
                       seq_alt.row_for_history(k, tuple));
          for (std::size_t i = k; i-- > 0;) {
            if (++tuple[i] < seq.component_space(i).size()) break;
            tuple[i] = 0;
          }
        }
      }
    } else if (tracking_states && markov_step) {
      const std::size_t states = seq.component_space(k - 1).size();
      std::vector<bool> next(seq.component_space(k).size(), false);
      for (std::uint32_t x = 0; x < states; ++x) {
        if (!reachable_states[x]) continue;
        const ProbMeasure& row = seq.step(k).kernel.row(x);
        const ProbMeasure& row_alt = seq_alt.step(k).kernel.row(x);
        stats.absorb(row, row_alt);
        for (std::uint32_t y = 0; y < next.size(); ++y) {
          if (row.weight(y) > 0.0 || row_alt.weight(y) > 0.0) next[y] = true;
        }
      }
      reachable_states = std::move(next);
    } else {
      if (tracking_states) {
        // switch from state tracking to explicit history tuples
        tracking_states = false;
        if (k == 1) {
          history_tuples.clear();
          for (std::uint32_t x = 0; x < reachable_states.size(); ++x) {
            if (reachable_states[x]) history_tuples.push_back(x);
          }
        } else {
          // rebuild reachable prefixes from scratch up to step k-1
          history_tuples.clear();
          for (std::uint32_t x = 0; x < seq.component_space(0).size(); ++x) {
            if (seq.initial().weight(x) > 0.0 ||
                seq_alt.initial().weight(x) > 0.0) {
              history_tuples.push_back(x);
            }
          }
          std::size_t count = history_tuples.size();
          for (std::size_t j = 1; j < k; ++j) {
            std::vector<std::uint32_t> grown;
            const std::size_t target = seq.component_space(j).size();
            if (count > state_cap / target) {
              throw std::runtime_error(
                  "make_report: reachable history set exceeds the cap at "
                  "step " + std::to_string(j));
            }
            for (std::size_t i = 0; i < count; ++i) {
              const std::span<const std::uint32_t> h{
                  history_tuples.data() + i * j, j};
              const ProbMeasure& row = seq.row_for_history(j, h);
              const ProbMeasure& row_alt = seq_alt.row_for_history(j, h);
              for (std::uint32_t y = 0; y < target; ++y) {
                if (row.weight(y) > 0.0 || row_alt.weight(y) > 0.0) {
                  grown.insert(grown.end(), h.begin(), h.end());
                  grown.push_back(y);
                }
              }
            }
            history_tuples = std::move(grown);
            count = history_tuples.size() / (j + 1);
          }
        }
      }
      const std::size_t count = history_tuples.size() / k;
      std::vector<std::uint32_t> grown;
      const std::size_t target = seq.component_space(k).size();
      if (count > state_cap / std::max<std::size_t>(target, 1)) {
        throw std::runtime_error(
            "make_report: reachable history set exceeds the cap at step " +
            std::to_string(k));
      }
      for (std::size_t i = 0; i < count; ++i) {
        const std::span<const std::uint32_t> h{history_tuples.data() + i * k, k};
        const ProbMeasure& row = seq.row_for_history(k, h);
        const ProbMeasure& row_alt = seq_alt.row_for_history(k, h);
        stats.absorb(row, row_alt);
        for (std::uint32_t y = 0; y < target; ++y) {
          if (row.weight(y) > 0.0 || row_alt.weight(y) > 0.0) {
            grown.insert(grown.end(), h.begin(), h.end());
            grown.push_back(y);
          }
        }
      }
      history_tuples = std::move(grown);
    }

    budgets.push_back(stats.tv_sup);
    overlaps.push_back(stats.overlap_inf);
  }

  std::optional<double> exact;
  if (options.exact) {
    std::size_t bound = 1;
    for (std::size_t k = 0; k <= horizon; ++k) {
      const std::size_t s = seq.component_space(k).size();
      if (bound > options.enumeration_cap / s) {
        throw std::runtime_error(
            "make_report: exact enumeration would exceed the cap; use "
            "coupled_sampler to estimate instead");
      }
      bound *= s;
    }
    EnumerationOptions enum_options;
    enum_options.cap = options.enumeration_cap;
    const TrajectoryMeasure p = ionescu_tulcea(seq, horizon, enum_options);
    const TrajectoryMeasure p_alt =
        ionescu_tulcea(seq_alt, horizon, enum_options);
    exact = trajectory_tv(p, p_alt);
  }

  PerturbationBudget budget(std::move(budgets));
  const double lin = linear_bound(budget);
  const double mult = multiplicative_bound(budget);
  const double overlap = overlap_lower_bound(overlaps);
  return BoundReport(horizon, exact, lin, mult, overlap, std::move(budget));
}

}  // namespace tvbound
