#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tvbound/kernel.hpp"
#include "tvbound/measure.hpp"

namespace tvbound {

/// Default ceiling on the number of trajectories an exact enumeration may
/// materialize before construction refuses and points at the Monte Carlo
/// sampler instead.
inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

/// Exact sparse probability measure on a finite product space
/// X_0 x ... x X_n. Support tuples are stored lexicographically sorted in one
/// flat arena (row-major over the canonical atom orders), which fixes the
/// iteration order of every downstream sum.
///
/// Only exact zeros are pruned by default; a positive prune threshold (used
/// for exploratory large-horizon runs) records the discarded mass so results
/// are clearly flagged as approximate.
class TrajectoryMeasure {
 public:
  using Tuple = std::vector<std::uint32_t>;

  TrajectoryMeasure(std::vector<AtomSpace> component_spaces,
                    std::vector<std::uint32_t> tuples,
                    std::vector<double> weights, double pruned_mass = 0.0);

  static TrajectoryMeasure from_map(std::vector<AtomSpace> component_spaces,
                                    const std::map<Tuple, double>& weights);

  std::size_t horizon() const { return spaces_.size() - 1; }
  std::size_t arity() const { return spaces_.size(); }
  const std::vector<AtomSpace>& component_spaces() const { return spaces_; }

  std::size_t support_size() const { return weights_.size(); }
  std::span<const std::uint32_t> tuple(std::size_t i) const;
  double weight_at(std::size_t i) const { return weights_.at(i); }

  /// Weight of a trajectory; zero when absent from the support.
  double weight_of(std::span<const std::uint32_t> tuple) const;

  double mass() const;
  double pruned_mass() const { return pruned_mass_; }

  std::string tuple_label(std::size_t i) const;

  /// Flattens onto the materialized product space (row-major atom order).
  ProbMeasure to_prob_measure(std::size_t cap = kDefaultEnumerationCap) const;

 private:
  std::vector<AtomSpace> spaces_;
  std::vector<std::uint32_t> tuples_;  // support_size * arity, sorted
  std::vector<double> weights_;
  double pruned_mass_ = 0.0;
};

enum class StepKind {
  markov,        // row depends on the last coordinate of the history
  full_history,  // row indexed by the whole history tuple (row-major flatten)
};

struct KernelStep {
  FiniteKernel kernel;
  StepKind kind;
};

/// An initial measure plus a sequence of transition kernels; step k maps
/// histories (x_0, ..., x_{k-1}) to a measure on X_k. Markov steps keep the
/// compact last-coordinate table instead of materializing all histories.
class KernelSequence {
 public:
  KernelSequence(ProbMeasure initial, std::vector<KernelStep> steps);

  const ProbMeasure& initial() const { return initial_; }
  std::size_t step_count() const { return steps_.size(); }

  /// Step k for k in [1, step_count()].
  const KernelStep& step(std::size_t k) const;

  /// Space of coordinate k, for k in [0, step_count()].
  const AtomSpace& component_space(std::size_t k) const;

  /// Transition row of step k given the history (x_0, ..., x_{k-1}).
  const ProbMeasure& row_for_history(
      std::size_t k, std::span<const std::uint32_t> history) const;

  /// Step k as an explicit kernel on a materialized history space whose atoms
  /// are the row-major flattened tuples of X_0 x ... x X_{k-1}.
  FiniteKernel history_expanded_step(std::size_t k,
                                     const AtomSpace& history_space) const;

 private:
  ProbMeasure initial_;
  std::vector<KernelStep> steps_;
  std::vector<AtomSpace> component_spaces_;
};

/// True when the two sequences share every component space up to the shorter
/// horizon, so TV distances and couplings between them are defined.
bool compatible(const KernelSequence& a, const KernelSequence& b,
                std::size_t horizon);

struct EnumerationOptions {
  std::size_t cap = kDefaultEnumerationCap;
  double prune_below = 0.0;  // approximation knob, 0 keeps exactness
};

/// Product of a measure and a kernel: weight mu(x) * K_x(y) at (x, y).
TrajectoryMeasure product_measure(const ProbMeasure& mu,
                                  const FiniteKernel& kernel);

/// Exact product measure of the first n+1 coordinates generated by the
/// sequence: iterated product of the initial measure and steps 1..n.
TrajectoryMeasure ionescu_tulcea(const KernelSequence& sequence,
                                 std::size_t horizon,
                                 const EnumerationOptions& options = {});

/// Image under the coordinate projection onto `coords` (sorted, nonempty).
TrajectoryMeasure marginal(const TrajectoryMeasure& measure,
                           std::span<const std::size_t> coords);

/// Exact total variation distance over the union of the two supports.
double trajectory_tv(const TrajectoryMeasure& a, const TrajectoryMeasure& b);

/// Mass of the atomwise minimum (overlap) of two trajectory measures.
double trajectory_meet_mass(const TrajectoryMeasure& a,
                            const TrajectoryMeasure& b);

/// Atomwise maximum absolute weight difference over the union of supports.
double trajectory_max_abs_diff(const TrajectoryMeasure& a,
                               const TrajectoryMeasure& b);

}  // namespace tvbound
