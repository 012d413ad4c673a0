#include "tvbound/product.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvbound/numeric.hpp"

namespace tvbound {

namespace {

int compare_tuples(std::span<const std::uint32_t> a,
                   std::span<const std::uint32_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

void require_same_shape(const TrajectoryMeasure& a, const TrajectoryMeasure& b,
                        const char* op) {
  if (a.arity() != b.arity()) {
    throw std::invalid_argument(std::string(op) + ": horizons differ");
  }
  for (std::size_t k = 0; k < a.arity(); ++k) {
    if (!a.component_spaces()[k].same_as(b.component_spaces()[k])) {
      throw std::invalid_argument(std::string(op) + ": component space " +
                                  std::to_string(k) + " differs");
    }
  }
}

// Walks the union of two sorted supports, feeding (weight_a, weight_b) pairs
// (absent entries as zero) to `visit` in canonical order.
template <typename Visit>
void merge_supports(const TrajectoryMeasure& a, const TrajectoryMeasure& b,
                    Visit&& visit) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.support_size() || j < b.support_size()) {
    if (i == a.support_size()) {
      visit(0.0, b.weight_at(j));
      ++j;
    } else if (j == b.support_size()) {
      visit(a.weight_at(i), 0.0);
      ++i;
    } else {
      const int cmp = compare_tuples(a.tuple(i), b.tuple(j));
      if (cmp < 0) {
        visit(a.weight_at(i), 0.0);
        ++i;
      } else if (cmp > 0) {
        visit(0.0, b.weight_at(j));
        ++j;
      } else {
        visit(a.weight_at(i), b.weight_at(j));
        ++i;
        ++j;
      }
    }
  }
}

}  // namespace

TrajectoryMeasure::TrajectoryMeasure(std::vector<AtomSpace> component_spaces,
                                     std::vector<std::uint32_t> tuples,
                                     std::vector<double> weights,
                                     double pruned_mass)
    : spaces_(std::move(component_spaces)), tuples_(std::move(tuples)),
      weights_(std::move(weights)), pruned_mass_(pruned_mass) {
  if (spaces_.empty()) {
    throw std::invalid_argument(
        "TrajectoryMeasure: need at least one component space");
  }
  const std::size_t arity = spaces_.size();
  if (tuples_.size() != weights_.size() * arity) {
    throw std::invalid_argument("TrajectoryMeasure: arena shape mismatch");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument(
          "TrajectoryMeasure: support weights must be finite and positive");
    }
    for (std::size_t k = 0; k < arity; ++k) {
      if (tuples_[i * arity + k] >= spaces_[k].size()) {
        throw std::invalid_argument(
            "TrajectoryMeasure: coordinate out of range at position " +
            std::to_string(k));
      }
    }
    if (i > 0 && compare_tuples(tuple(i - 1), tuple(i)) >= 0) {
      throw std::invalid_argument(
          "TrajectoryMeasure: support tuples must be strictly sorted");
    }
  }
  const double total = mass() + pruned_mass_;
  if (std::abs(total - 1.0) > kMassTol) {
    throw std::invalid_argument("TrajectoryMeasure: total mass " +
                                format_double(total) +
                                " outside tolerance of 1");
  }
}

TrajectoryMeasure TrajectoryMeasure::from_map(
    std::vector<AtomSpace> component_spaces,
    const std::map<Tuple, double>& weights) {
  const std::size_t arity = component_spaces.size();
  std::vector<std::uint32_t> tuples;
  std::vector<double> values;
  tuples.reserve(weights.size() * arity);
  values.reserve(weights.size());
  for (const auto& [tuple, w] : weights) {
    if (tuple.size() != arity) {
      throw std::invalid_argument(
          "TrajectoryMeasure::from_map: tuple arity mismatch");
    }
    if (w == 0.0) continue;
    tuples.insert(tuples.end(), tuple.begin(), tuple.end());
    values.push_back(w);
  }
  return TrajectoryMeasure(std::move(component_spaces), std::move(tuples),
                           std::move(values));
}

std::span<const std::uint32_t> TrajectoryMeasure::tuple(std::size_t i) const {
  const std::size_t arity = spaces_.size();
  return {tuples_.data() + i * arity, arity};
}

double TrajectoryMeasure::weight_of(
    std::span<const std::uint32_t> tuple) const {
  if (tuple.size() != arity()) {
    throw std::invalid_argument("TrajectoryMeasure: tuple arity mismatch");
  }
  std::size_t lo = 0;
  std::size_t hi = support_size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int cmp = compare_tuples(this->tuple(mid), tuple);
    if (cmp == 0) return weights_[mid];
    if (cmp < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return 0.0;
}

double TrajectoryMeasure::mass() const { return sum(weights_); }

std::string TrajectoryMeasure::tuple_label(std::size_t i) const {
  const auto t = tuple(i);
  std::string label = "(";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) label += ",";
    label += spaces_[k].label(t[k]);
  }
  label += ")";
  return label;
}

ProbMeasure TrajectoryMeasure::to_prob_measure(std::size_t cap) const {
  std::size_t total = 1;
  for (const auto& s : spaces_) {
    if (total > cap / s.size()) {
      throw std::runtime_error(
          "TrajectoryMeasure::to_prob_measure: flattened space would exceed "
          "the enumeration cap");
    }
    total *= s.size();
  }
  const AtomSpace flat = product_space(spaces_);
  std::vector<double> weights(flat.size(), 0.0);
  const std::size_t n = arity();
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t k = n - 1; k-- > 0;) {
    strides[k] = strides[k + 1] * spaces_[k + 1].size();
  }
  for (std::size_t i = 0; i < support_size(); ++i) {
    const auto t = tuple(i);
    std::size_t flat_index = 0;
    for (std::size_t k = 0; k < n; ++k) flat_index += t[k] * strides[k];
    weights[flat_index] = weight_at(i);
  }
  return ProbMeasure(flat, std::move(weights));
}

KernelSequence::KernelSequence(ProbMeasure initial,
                               std::vector<KernelStep> steps)
    : initial_(std::move(initial)), steps_(std::move(steps)) {
  component_spaces_.push_back(initial_.space());
  // history count saturates for long markov chains; it is only needed to
  // validate the source size of explicit full-history tables, which are
  // materialized and therefore small
  constexpr std::size_t kSaturated = static_cast<std::size_t>(-1);
  std::size_t history_count = initial_.space().size();
  for (std::size_t k = 1; k <= steps_.size(); ++k) {
    const KernelStep& step = steps_[k - 1];
    if (step.kind == StepKind::markov) {
      if (!step.kernel.source().same_as(component_spaces_.back())) {
        throw std::invalid_argument(
            "KernelSequence: markov step " + std::to_string(k) +
            " source does not match the previous coordinate space");
      }
    } else {
      if (step.kernel.source().size() != history_count) {
        throw std::invalid_argument(
            "KernelSequence: full-history step " + std::to_string(k) +
            " source size does not match the history count");
      }
    }
    component_spaces_.push_back(step.kernel.target());
    const std::size_t target_size = step.kernel.target().size();
    history_count = history_count > kSaturated / target_size
                        ? kSaturated
                        : history_count * target_size;
  }
}

const KernelStep& KernelSequence::step(std::size_t k) const {
  if (k == 0 || k > steps_.size()) {
    throw std::invalid_argument("KernelSequence: step index out of range");
  }
  return steps_[k - 1];
}

const AtomSpace& KernelSequence::component_space(std::size_t k) const {
  if (k >= component_spaces_.size()) {
    throw std::invalid_argument(
        "KernelSequence: coordinate index out of range");
  }
  return component_spaces_[k];
}

const ProbMeasure& KernelSequence::row_for_history(
    std::size_t k, std::span<const std::uint32_t> history) const {
  const KernelStep& s = step(k);
  if (history.size() != k) {
    throw std::invalid_argument(
        "KernelSequence: history length does not match the step index");
  }
  if (s.kind == StepKind::markov) {
    return s.kernel.row(history.back());
  }
  // row-major flatten of the history tuple
  std::size_t flat = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    flat = flat * component_spaces_[i].size() + history[i];
  }
  return s.kernel.row(static_cast<std::uint32_t>(flat));
}

FiniteKernel KernelSequence::history_expanded_step(
    std::size_t k, const AtomSpace& history_space) const {
  std::size_t expected = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (expected > (std::size_t(1) << 32) / component_spaces_[i].size()) {
      throw std::invalid_argument(
          "KernelSequence: history space too large to expand at step " +
          std::to_string(k));
    }
    expected *= component_spaces_[i].size();
  }
  if (history_space.size() != expected) {
    throw std::invalid_argument(
        "KernelSequence: history space size does not match step " +
        std::to_string(k));
  }
  std::vector<ProbMeasure> rows;
  rows.reserve(expected);
  std::vector<std::uint32_t> tuple(k, 0);
  for (std::size_t flat = 0; flat < expected; ++flat) {
    rows.push_back(row_for_history(k, tuple));
    for (std::size_t i = k; i-- > 0;) {
      if (++tuple[i] < component_spaces_[i].size()) break;
      tuple[i] = 0;
    }
  }
  return FiniteKernel(history_space, component_spaces_[k], std::move(rows));
}

bool compatible(const KernelSequence& a, const KernelSequence& b,
                std::size_t horizon) {
  if (horizon > a.step_count() || horizon > b.step_count()) return false;
  for (std::size_t k = 0; k <= horizon; ++k) {
    if (!a.component_space(k).same_as(b.component_space(k))) return false;
  }
  return true;
}

TrajectoryMeasure product_measure(const ProbMeasure& mu,
                                  const FiniteKernel& kernel) {
  if (!kernel.source().same_as(mu.space())) {
    throw std::invalid_argument(
        "product_measure: kernel source does not match the measure space");
  }
  std::vector<std::uint32_t> tuples;
  std::vector<double> weights;
  for (std::uint32_t x = 0; x < mu.size(); ++x) {
    const double wx = mu.weight(x);
    if (wx == 0.0) continue;
    const ProbMeasure& row = kernel.row(x);
    for (std::uint32_t y = 0; y < row.size(); ++y) {
      const double w = wx * row.weight(y);
      if (w == 0.0) continue;
      tuples.push_back(x);
      tuples.push_back(y);
      weights.push_back(w);
    }
  }
  return TrajectoryMeasure({mu.space(), kernel.target()}, std::move(tuples),
                           std::move(weights));
}

TrajectoryMeasure ionescu_tulcea(const KernelSequence& sequence,
                                 std::size_t horizon,
                                 const EnumerationOptions& options) {
  if (horizon > sequence.step_count()) {
    throw std::invalid_argument(
        "ionescu_tulcea: horizon " + std::to_string(horizon) +
        " exceeds the " + std::to_string(sequence.step_count()) +
        " available kernels");
  }
  std::vector<AtomSpace> spaces;
  spaces.reserve(horizon + 1);
  for (std::size_t k = 0; k <= horizon; ++k) {
    spaces.push_back(sequence.component_space(k));
  }

  std::vector<std::uint32_t> tuples;
  std::vector<double> weights;
  double pruned = 0.0;
  const ProbMeasure& initial = sequence.initial();
  for (std::uint32_t x = 0; x < initial.size(); ++x) {
    const double w = initial.weight(x);
    if (w == 0.0) continue;
    if (w < options.prune_below) {
      pruned += w;
      continue;
    }
    tuples.push_back(x);
    weights.push_back(w);
  }

  for (std::size_t k = 1; k <= horizon; ++k) {
    const std::size_t target_size = sequence.component_space(k).size();
    if (weights.size() > options.cap / target_size) {
      throw std::runtime_error(
          "ionescu_tulcea: step " + std::to_string(k) + " would enumerate " +
          std::to_string(weights.size()) + " x " +
          std::to_string(target_size) +
          " trajectories, above the cap; use coupled_sampler for horizons "
          "beyond exact enumeration");
    }
    std::vector<std::uint32_t> next_tuples;
    std::vector<double> next_weights;
    next_tuples.reserve(tuples.size() + weights.size());
    next_weights.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::span<const std::uint32_t> parent{tuples.data() + i * k, k};
      const ProbMeasure& row = sequence.row_for_history(k, parent);
      for (std::uint32_t y = 0; y < row.size(); ++y) {
        const double w = weights[i] * row.weight(y);
        if (w == 0.0) continue;
        if (w < options.prune_below) {
          pruned += w;
          continue;
        }
        next_tuples.insert(next_tuples.end(), parent.begin(), parent.end());
        next_tuples.push_back(y);
        next_weights.push_back(w);
      }
    }
    tuples = std::move(next_tuples);
    weights = std::move(next_weights);
  }

  // Parent-major expansion with children in canonical order keeps the arena
  // lexicographically sorted at every step.
  return TrajectoryMeasure(std::move(spaces), std::move(tuples),
                           std::move(weights), pruned);
}

TrajectoryMeasure marginal(const TrajectoryMeasure& measure,
                           std::span<const std::size_t> coords) {
  if (coords.empty()) {
    throw std::invalid_argument("marginal: coordinate set must be nonempty");
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] >= measure.arity()) {
      throw std::invalid_argument("marginal: coordinate " +
                                  std::to_string(coords[i]) +
                                  " out of range");
    }
    if (i > 0 && coords[i] <= coords[i - 1]) {
      throw std::invalid_argument(
          "marginal: coordinates must be strictly increasing");
    }
  }
  std::vector<AtomSpace> spaces;
  spaces.reserve(coords.size());
  for (std::size_t c : coords) spaces.push_back(measure.component_spaces()[c]);

  std::map<TrajectoryMeasure::Tuple, double> projected;
  TrajectoryMeasure::Tuple key(coords.size());
  for (std::size_t i = 0; i < measure.support_size(); ++i) {
    const auto t = measure.tuple(i);
    for (std::size_t j = 0; j < coords.size(); ++j) key[j] = t[coords[j]];
    projected[key] += measure.weight_at(i);
  }
  return TrajectoryMeasure::from_map(std::move(spaces), projected);
}

double trajectory_tv(const TrajectoryMeasure& a, const TrajectoryMeasure& b) {
  require_same_shape(a, b, "trajectory_tv");
  NeumaierSum s;
  merge_supports(a, b, [&](double wa, double wb) { s.add(std::abs(wa - wb)); });
  return s.value();
}

double trajectory_meet_mass(const TrajectoryMeasure& a,
                            const TrajectoryMeasure& b) {
  require_same_shape(a, b, "trajectory_meet_mass");
  NeumaierSum s;
  merge_supports(a, b, [&](double wa, double wb) { s.add(std::min(wa, wb)); });
  return s.value();
}

double trajectory_max_abs_diff(const TrajectoryMeasure& a,
                               const TrajectoryMeasure& b) {
  require_same_shape(a, b, "trajectory_max_abs_diff");
  double worst = 0.0;
  merge_supports(a, b, [&](double wa, double wb) {
    worst = std::max(worst, std::abs(wa - wb));
  });
  return worst;
}

}  // namespace tvbound
