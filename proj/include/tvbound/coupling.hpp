#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "tvbound/product.hpp"

namespace tvbound {

/// Joint probability measure on the pair space left x right together with
/// the two marginals it is certified to have. Construction verifies both
/// marginal certificates atomwise, so a Coupling value is always a valid
/// coupling of its intended measures.
class Coupling {
 public:
  Coupling(AtomSpace left_space, AtomSpace right_space, ProbMeasure joint,
           ProbMeasure intended_left, ProbMeasure intended_right);

  const AtomSpace& left_space() const { return left_; }
  const AtomSpace& right_space() const { return right_; }
  const ProbMeasure& joint() const { return joint_; }
  const ProbMeasure& intended_left() const { return intended_left_; }
  const ProbMeasure& intended_right() const { return intended_right_; }

  double joint_weight(std::uint32_t left_atom, std::uint32_t right_atom) const;

 private:
  AtomSpace left_;
  AtomSpace right_;
  ProbMeasure joint_;
  ProbMeasure intended_left_;
  ProbMeasure intended_right_;
};

/// Mass the coupling puts on the diagonal. Bounded above by the overlap of
/// the two marginals (the coupling inequality); the gamma coupling attains
/// the bound.
double diagonal_mass(const Coupling& coupling);

/// Maximal coupling of two measures on a shared space: the meet pushed onto
/// the diagonal plus, when the overlap is below one, the normalized product
/// of the positive and negative parts of the difference.
Coupling gamma_coupling(const ProbMeasure& nu, const ProbMeasure& nu_alt);

/// Independent (product) coupling.
Coupling independent_coupling(const ProbMeasure& nu, const ProbMeasure& nu_alt);

/// Couples two kernels row by row: the gamma coupling where the source pair
/// sits on the diagonal, the independent coupling elsewhere. Rows are
/// computed on demand; the object never materializes all |X|^2 rows.
class CouplingKernel {
 public:
  CouplingKernel(FiniteKernel left, FiniteKernel right);

  const FiniteKernel& left() const { return left_; }
  const FiniteKernel& right() const { return right_; }

  Coupling row(std::uint32_t left_atom, std::uint32_t right_atom) const;

 private:
  FiniteKernel left_;
  FiniteKernel right_;
};

/// The coupling kernel of the sequential construction.
CouplingKernel sequential_coupling_kernel(const FiniteKernel& kernel,
                                          const FiniteKernel& kernel_alt);

/// One sequential step: extends a coupling m on X^2 by a coupling kernel
/// X^2 -> P(Y^2), identifying ((x, x'), (y, y')) with ((x, y), (x', y')).
/// The result is certified against the product measures of the intended
/// marginals with the two coupled kernels.
Coupling coupled_product(const Coupling& m, const CouplingKernel& kappa,
                         std::size_t cap = kDefaultEnumerationCap);

/// Iterates coupled_product over the first `horizon` steps of two kernel
/// sequences, starting from the gamma coupling of the initial measures.
/// Exact but exponential in the horizon; guarded by `cap`.
Coupling exact_coupled_chain(const KernelSequence& seq,
                             const KernelSequence& seq_alt,
                             std::size_t horizon,
                             std::size_t cap = kDefaultEnumerationCap);

/// Diagonal mass of exact_coupled_chain(seq, seq_alt, horizon) computed
/// without materializing the joint: once a trajectory pair leaves the
/// diagonal it never returns, so the diagonal sub-measure evolves by
/// multiplying with the stepwise row overlaps along each history.
double coupled_diagonal_mass(const KernelSequence& seq,
                             const KernelSequence& seq_alt,
                             std::size_t horizon,
                             std::size_t cap = kDefaultEnumerationCap);

struct McEstimate {
  double estimate;     // fraction of fully diagonal trajectory pairs
  double half_width;   // sqrt(p(1-p)/n), normal approximation
  std::uint64_t diagonal_count;
  std::uint64_t samples;
};

/// Sequential Monte Carlo realization of the coupled chain for horizons
/// beyond exact enumeration. Draws (x0, x0') from the gamma coupling of the
/// initial measures, then steps with the gamma coupling while the full
/// prefixes coincide and independently once they have separated; returns the
/// fraction of sample pairs that stay equal through the horizon.
///
/// Reproducibility contract: the stream is std::mt19937_64 seeded per block
/// of 4096 samples with substream_seed(seed, block); each gamma draw consumes
/// one uniform (inverse CDF over the canonically ordered pair support) and
/// each independent step consumes two. Reruns with the same seed are
/// bit-identical, and the estimate does not depend on how blocks are
/// scheduled across workers.
McEstimate coupled_sampler(const KernelSequence& seq,
                           const KernelSequence& seq_alt, std::size_t horizon,
                           std::uint64_t samples, std::uint64_t seed);

namespace detail {

/// Support of the gamma coupling of two weight vectors, entries
/// (left, right, weight) in ascending (left, right) order, plus the overlap.
struct GammaPairWeights {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
  double meet_mass;
};

GammaPairWeights gamma_pair_weights(std::span<const double> nu,
                                    std::span<const double> nu_alt);

}  // namespace detail

}  // namespace tvbound
