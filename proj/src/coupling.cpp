#include "tvbound/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "tvbound/numeric.hpp"
#include "tvbound/rng.hpp"

namespace tvbound {

namespace detail {

GammaPairWeights gamma_pair_weights(std::span<const double> nu,
                                    std::span<const double> nu_alt) {
  const std::size_t s = nu.size();
  GammaPairWeights out;

  NeumaierSum meet;
  for (std::size_t i = 0; i < s; ++i) meet.add(std::min(nu[i], nu_alt[i]));
  out.meet_mass = meet.value();

  // The residual term only exists while the overlap is strictly below one;
  // at (or within dust of) full overlap its normalizer would underflow.
  const bool residual = out.meet_mass < 1.0 - kExactTol;
  const double denom = 1.0 - out.meet_mass;

  std::vector<std::uint32_t> neg_support;
  if (residual) {
    for (std::uint32_t j = 0; j < s; ++j) {
      if (nu_alt[j] > nu[j]) neg_support.push_back(j);
    }
  }

  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::uint32_t i = 0; i < s; ++i) {
    row.clear();
    const double mini = std::min(nu[i], nu_alt[i]);
    if (mini > 0.0) row.emplace_back(i, mini);
    const double pos = nu[i] - nu_alt[i];
    if (residual && pos > 0.0) {
      for (std::uint32_t j : neg_support) {
        row.emplace_back(j, pos * (nu_alt[j] - nu[j]) / denom);
      }
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [j, w] : row) out.entries.emplace_back(i, j, w);
  }
  return out;
}

}  // namespace detail

namespace {

void verify_marginals(const AtomSpace& left, const AtomSpace& right,
                      const ProbMeasure& joint, const ProbMeasure& want_left,
                      const ProbMeasure& want_right) {
  const std::size_t sl = left.size();
  const std::size_t sr = right.size();
  if (joint.size() != sl * sr) {
    throw std::invalid_argument(
        "Coupling: joint measure does not live on the pair space");
  }
  if (!want_left.space().same_as(left) || !want_right.space().same_as(right)) {
    throw std::invalid_argument(
        "Coupling: intended marginals live on the wrong spaces");
  }
  for (std::uint32_t i = 0; i < sl; ++i) {
    NeumaierSum s;
    for (std::uint32_t j = 0; j < sr; ++j) s.add(joint.weight(i * sr + j));
    const double diff = std::abs(s.value() - want_left.weight(i));
    if (diff > kExactTol) {
      throw std::invalid_argument(
          "Coupling: left marginal off by " + format_double(diff) +
          " at atom '" + left.label(i) + "'");
    }
  }
  for (std::uint32_t j = 0; j < sr; ++j) {
    NeumaierSum s;
    for (std::uint32_t i = 0; i < sl; ++i) s.add(joint.weight(i * sr + j));
    const double diff = std::abs(s.value() - want_right.weight(j));
    if (diff > kExactTol) {
      throw std::invalid_argument(
          "Coupling: right marginal off by " + format_double(diff) +
          " at atom '" + right.label(j) + "'");
    }
  }
}

// Cumulative-weight table for inverse-CDF draws over a measure's support,
// atoms in canonical order.
struct RowCdf {
  std::vector<std::uint32_t> atoms;
  std::vector<double> cum;

  explicit RowCdf(std::span<const double> weights) {
    double acc = 0.0;
    for (std::uint32_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      atoms.push_back(i);
      cum.push_back(acc);
    }
  }

  std::uint32_t draw(double u) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t idx =
        it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
    return atoms[idx];
  }
};

// Same, over the pair support of a gamma coupling.
struct PairCdf {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<double> cum;

  PairCdf(std::span<const double> nu, std::span<const double> nu_alt) {
    const auto gamma = detail::gamma_pair_weights(nu, nu_alt);
    double acc = 0.0;
    pairs.reserve(gamma.entries.size());
    cum.reserve(gamma.entries.size());
    for (const auto& [i, j, w] : gamma.entries) {
      if (w <= 0.0) continue;
      acc += w;
      pairs.emplace_back(i, j);
      cum.push_back(acc);
    }
  }

  std::pair<std::uint32_t, std::uint32_t> draw(double u) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t idx =
        it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
    return pairs[idx];
  }
};

}  // namespace

Coupling::Coupling(AtomSpace left_space, AtomSpace right_space,
                   ProbMeasure joint, ProbMeasure intended_left,
                   ProbMeasure intended_right)
    : left_(std::move(left_space)), right_(std::move(right_space)),
      joint_(std::move(joint)), intended_left_(std::move(intended_left)),
      intended_right_(std::move(intended_right)) {
  verify_marginals(left_, right_, joint_, intended_left_, intended_right_);
}

double Coupling::joint_weight(std::uint32_t left_atom,
                              std::uint32_t right_atom) const {
  if (left_atom >= left_.size() || right_atom >= right_.size()) {
    throw std::invalid_argument("Coupling::joint_weight: atom out of range");
  }
  return joint_.weight(left_atom * static_cast<std::uint32_t>(right_.size()) +
                       right_atom);
}

double diagonal_mass(const Coupling& coupling) {
  if (!coupling.left_space().same_as(coupling.right_space())) {
    throw std::invalid_argument(
        "diagonal_mass: coupling joins two different spaces");
  }
  const std::size_t s = coupling.left_space().size();
  NeumaierSum sum;
  for (std::uint32_t i = 0; i < s; ++i) {
    sum.add(coupling.joint().weight(static_cast<std::uint32_t>(i * s + i)));
  }
  return sum.value();
}

Coupling gamma_coupling(const ProbMeasure& nu, const ProbMeasure& nu_alt) {
  if (!nu.space().same_as(nu_alt.space())) {
    throw std::invalid_argument(
        "gamma_coupling: measures live on incompatible atom spaces");
  }
  const std::size_t s = nu.size();
  const auto gamma = detail::gamma_pair_weights(nu.weights(), nu_alt.weights());
  std::vector<double> joint(s * s, 0.0);
  for (const auto& [i, j, w] : gamma.entries) joint[i * s + j] += w;
  AtomSpace pair = product_space(nu.space(), nu.space());
  return Coupling(nu.space(), nu.space(),
                  ProbMeasure(std::move(pair), std::move(joint)), nu, nu_alt);
}

Coupling independent_coupling(const ProbMeasure& nu,
                              const ProbMeasure& nu_alt) {
  const std::size_t sl = nu.size();
  const std::size_t sr = nu_alt.size();
  std::vector<double> joint(sl * sr);
  for (std::uint32_t i = 0; i < sl; ++i) {
    for (std::uint32_t j = 0; j < sr; ++j) {
      joint[i * sr + j] = nu.weight(i) * nu_alt.weight(j);
    }
  }
  AtomSpace pair = product_space(nu.space(), nu_alt.space());
  return Coupling(nu.space(), nu_alt.space(),
                  ProbMeasure(std::move(pair), std::move(joint)), nu, nu_alt);
}

CouplingKernel::CouplingKernel(FiniteKernel left, FiniteKernel right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_.source().same_as(right_.source()) ||
      !left_.target().same_as(right_.target())) {
    throw std::invalid_argument(
        "CouplingKernel: kernels live on incompatible spaces");
  }
}

Coupling CouplingKernel::row(std::uint32_t left_atom,
                             std::uint32_t right_atom) const {
  if (left_atom == right_atom) {
    return gamma_coupling(left_.row(left_atom), right_.row(right_atom));
  }
  return independent_coupling(left_.row(left_atom), right_.row(right_atom));
}

CouplingKernel sequential_coupling_kernel(const FiniteKernel& kernel,
                                          const FiniteKernel& kernel_alt) {
  return CouplingKernel(kernel, kernel_alt);
}

Coupling coupled_product(const Coupling& m, const CouplingKernel& kappa,
                         std::size_t cap) {
  if (!kappa.left().source().same_as(m.left_space()) ||
      !kappa.right().source().same_as(m.right_space())) {
    throw std::invalid_argument(
        "coupled_product: coupling kernel source does not match the coupling "
        "pair space");
  }
  const std::size_t sx = m.left_space().size();
  const std::size_t sy = kappa.left().target().size();
  const std::size_t sxy = sx * sy;
  if (sxy > cap / sxy) {
    throw std::runtime_error(
        "coupled_product: pair space of " + std::to_string(sxy) + "^2 "
        "entries exceeds the cap; use coupled_diagonal_mass or "
        "coupled_sampler instead");
  }

  std::vector<double> joint(sxy * sxy, 0.0);
  for (std::uint32_t x = 0; x < sx; ++x) {
    for (std::uint32_t xa = 0; xa < sx; ++xa) {
      const double w = m.joint_weight(x, xa);
      if (w == 0.0) continue;
      const ProbMeasure& row = kappa.left().row(x);
      const ProbMeasure& row_alt = kappa.right().row(xa);
      if (x == xa) {
        const auto gamma =
            detail::gamma_pair_weights(row.weights(), row_alt.weights());
        for (const auto& [y, ya, v] : gamma.entries) {
          joint[(x * sy + y) * sxy + (xa * sy + ya)] += w * v;
        }
      } else {
        for (std::uint32_t y = 0; y < sy; ++y) {
          const double wy = row.weight(y);
          if (wy == 0.0) continue;
          for (std::uint32_t ya = 0; ya < sy; ++ya) {
            const double wya = row_alt.weight(ya);
            if (wya == 0.0) continue;
            joint[(x * sy + y) * sxy + (xa * sy + ya)] += w * wy * wya;
          }
        }
      }
    }
  }

  ProbMeasure intended_left =
      product_measure(m.intended_left(), kappa.left()).to_prob_measure(cap);
  ProbMeasure intended_right =
      product_measure(m.intended_right(), kappa.right()).to_prob_measure(cap);
  AtomSpace xy = intended_left.space();
  ProbMeasure joint_measure(product_space(xy, xy), std::move(joint));
  return Coupling(xy, xy, std::move(joint_measure), std::move(intended_left),
                  std::move(intended_right));
}

Coupling exact_coupled_chain(const KernelSequence& seq,
                             const KernelSequence& seq_alt,
                             std::size_t horizon, std::size_t cap) {
  if (!compatible(seq, seq_alt, horizon)) {
    throw std::invalid_argument(
        "exact_coupled_chain: sequences are incompatible at this horizon");
  }
  Coupling m = gamma_coupling(seq.initial(), seq_alt.initial());
  for (std::size_t k = 1; k <= horizon; ++k) {
    const AtomSpace& history = m.left_space();
    FiniteKernel left = seq.history_expanded_step(k, history);
    FiniteKernel right = seq_alt.history_expanded_step(k, history);
    m = coupled_product(m, CouplingKernel(std::move(left), std::move(right)),
                        cap);
  }
  return m;
}

double coupled_diagonal_mass(const KernelSequence& seq,
                             const KernelSequence& seq_alt,
                             std::size_t horizon, std::size_t cap) {
  if (!compatible(seq, seq_alt, horizon)) {
    throw std::invalid_argument(
        "coupled_diagonal_mass: sequences are incompatible at this horizon");
  }
  std::vector<std::uint32_t> tuples;
  std::vector<double> weights;
  const ProbMeasure& init = seq.initial();
  const ProbMeasure& init_alt = seq_alt.initial();
  for (std::uint32_t x = 0; x < init.size(); ++x) {
    const double w = std::min(init.weight(x), init_alt.weight(x));
    if (w == 0.0) continue;
    tuples.push_back(x);
    weights.push_back(w);
  }
  for (std::size_t k = 1; k <= horizon; ++k) {
    const std::size_t target_size = seq.component_space(k).size();
    if (!weights.empty() && weights.size() > cap / target_size) {
      throw std::runtime_error(
          "coupled_diagonal_mass: diagonal support exceeds the cap at step " +
          std::to_string(k));
    }
    std::vector<std::uint32_t> next_tuples;
    std::vector<double> next_weights;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::span<const std::uint32_t> history{tuples.data() + i * k, k};
      const ProbMeasure& row = seq.row_for_history(k, history);
      const ProbMeasure& row_alt = seq_alt.row_for_history(k, history);
      for (std::uint32_t y = 0; y < row.size(); ++y) {
        const double w =
            weights[i] * std::min(row.weight(y), row_alt.weight(y));
        if (w == 0.0) continue;
        next_tuples.insert(next_tuples.end(), history.begin(), history.end());
        next_tuples.push_back(y);
        next_weights.push_back(w);
      }
    }
    tuples = std::move(next_tuples);
    weights = std::move(next_weights);
  }
  return sum(weights);
}

McEstimate coupled_sampler(const KernelSequence& seq,
                           const KernelSequence& seq_alt, std::size_t horizon,
                           std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) {
    throw std::invalid_argument("coupled_sampler: need at least one sample");
  }
  if (!compatible(seq, seq_alt, horizon)) {
    throw std::invalid_argument(
        "coupled_sampler: sequences are incompatible at this horizon");
  }

  const PairCdf initial_cdf(seq.initial().weights(), seq_alt.initial().weights());

  // Per-step caches, valid for markov steps only (rows keyed by last state).
  struct StepCache {
    bool markov = false;
    std::vector<std::optional<PairCdf>> gamma;
    std::vector<std::optional<RowCdf>> row;
    std::vector<std::optional<RowCdf>> row_alt;
  };
  std::vector<StepCache> caches(horizon + 1);
  for (std::size_t k = 1; k <= horizon; ++k) {
    const bool markov = seq.step(k).kind == StepKind::markov &&
                        seq_alt.step(k).kind == StepKind::markov;
    caches[k].markov = markov;
    if (markov) {
      const std::size_t states = seq.component_space(k - 1).size();
      caches[k].gamma.resize(states);
      caches[k].row.resize(states);
      caches[k].row_alt.resize(states);
    }
  }

  constexpr std::uint64_t kBlock = 4096;
  std::uint64_t diagonal = 0;
  std::vector<std::uint32_t> traj(horizon + 1);
  std::vector<std::uint32_t> traj_alt(horizon + 1);

  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::mt19937_64 rng(substream_seed(seed, b));
    const std::uint64_t in_block = std::min(kBlock, samples - b * kBlock);
    for (std::uint64_t s = 0; s < in_block; ++s) {
      auto [x, xa] = initial_cdf.draw(unit_double(rng()));
      traj[0] = x;
      traj_alt[0] = xa;
      bool equal = x == xa;
      for (std::size_t k = 1; k <= horizon; ++k) {
        StepCache& cache = caches[k];
        std::uint32_t y;
        std::uint32_t ya;
        if (equal) {
          // identical prefixes: draw jointly from the gamma coupling
          const std::uint32_t last = traj[k - 1];
          if (cache.markov) {
            auto& slot = cache.gamma[last];
            if (!slot) {
              slot.emplace(seq.step(k).kernel.row(last).weights(),
                           seq_alt.step(k).kernel.row(last).weights());
            }
            std::tie(y, ya) = slot->draw(unit_double(rng()));
          } else {
            const std::span<const std::uint32_t> h{traj.data(), k};
            const PairCdf cdf(seq.row_for_history(k, h).weights(),
                              seq_alt.row_for_history(k, h).weights());
            std::tie(y, ya) = cdf.draw(unit_double(rng()));
          }
        } else {
          // separated prefixes: independent draws from each row
          if (cache.markov) {
            auto& slot = cache.row[traj[k - 1]];
            if (!slot) slot.emplace(seq.step(k).kernel.row(traj[k - 1]).weights());
            auto& slot_alt = cache.row_alt[traj_alt[k - 1]];
            if (!slot_alt) {
              slot_alt.emplace(seq_alt.step(k).kernel.row(traj_alt[k - 1]).weights());
            }
            y = slot->draw(unit_double(rng()));
            ya = slot_alt->draw(unit_double(rng()));
          } else {
            const std::span<const std::uint32_t> h{traj.data(), k};
            const std::span<const std::uint32_t> ha{traj_alt.data(), k};
            y = RowCdf(seq.row_for_history(k, h).weights())
                    .draw(unit_double(rng()));
            ya = RowCdf(seq_alt.row_for_history(k, ha).weights())
                     .draw(unit_double(rng()));
          }
        }
        traj[k] = y;
        traj_alt[k] = ya;
        equal = equal && y == ya;
      }
      if (equal) ++diagonal;
    }
  }

  const double p = static_cast<double>(diagonal) / static_cast<double>(samples);
  const double half_width =
      std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return McEstimate{p, half_width, diagonal, samples};
}

}  // namespace tvbound
