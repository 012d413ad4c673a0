#include "tvbound/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvbound/numeric.hpp"

namespace tvbound {

namespace {

void require_same_space(const AtomSpace& a, const AtomSpace& b,
                        const char* op) {
  if (!a.same_as(b)) {
    throw std::invalid_argument(std::string(op) +
                                ": measures live on incompatible atom spaces");
  }
}

}  // namespace

AtomSpace::AtomSpace(std::vector<std::string> labels) {
  if (labels.empty()) {
    throw std::invalid_argument("AtomSpace: atom list must be nonempty");
  }
  auto data = std::make_shared<Data>();
  data->labels = std::move(labels);
  data->index.reserve(data->labels.size());
  for (std::uint32_t i = 0; i < data->labels.size(); ++i) {
    auto [it, inserted] = data->index.emplace(data->labels[i], i);
    (void)it;
    if (!inserted) {
      throw std::invalid_argument("AtomSpace: duplicate atom label '" +
                                  data->labels[i] + "'");
    }
  }
  data_ = std::move(data);
}

AtomSpace AtomSpace::range(std::size_t count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) labels.push_back(std::to_string(i));
  return AtomSpace(std::move(labels));
}

const std::string& AtomSpace::label(std::uint32_t index) const {
  return data_->labels.at(index);
}

std::optional<std::uint32_t> AtomSpace::index_of(std::string_view label) const {
  auto it = data_->index.find(label);
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

bool AtomSpace::same_as(const AtomSpace& other) const {
  if (data_ == other.data_) return true;
  return data_->labels == other.data_->labels;
}

AtomSpace product_space(std::span<const AtomSpace> factors) {
  if (factors.empty()) {
    throw std::invalid_argument("product_space: no factors");
  }
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (total > (std::size_t(1) << 32) / f.size()) {
      throw std::invalid_argument(
          "product_space: product space too large to materialize");
    }
    total *= f.size();
  }
  std::vector<std::string> labels;
  labels.reserve(total);
  std::vector<std::uint32_t> tuple(factors.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::string label = "(";
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k > 0) label += ",";
      label += factors[k].label(tuple[k]);
    }
    label += ")";
    labels.push_back(std::move(label));
    // row-major odometer: last coordinate fastest
    for (std::size_t k = factors.size(); k-- > 0;) {
      if (++tuple[k] < factors[k].size()) break;
      tuple[k] = 0;
    }
  }
  return AtomSpace(std::move(labels));
}

AtomSpace product_space(const AtomSpace& a, const AtomSpace& b) {
  std::array<AtomSpace, 2> factors{a, b};
  return product_space(std::span<const AtomSpace>(factors));
}

SignedMeasure::SignedMeasure(AtomSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.size()) {
    throw std::invalid_argument(
        "SignedMeasure: weight count does not match space size");
  }
  for (double& w : weights_) {
    if (!std::isfinite(w)) {
      throw std::invalid_argument("SignedMeasure: weights must be finite");
    }
    if (std::abs(w) < kWeightDustTol) w = 0.0;
  }
}

SignedMeasure SignedMeasure::zero(AtomSpace space) {
  std::vector<double> w(space.size(), 0.0);
  return SignedMeasure(std::move(space), std::move(w));
}

double SignedMeasure::mass() const { return sum(weights_); }

SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b) {
  require_same_space(a.space(), b.space(), "measure sum");
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = a.weights()[i] + b.weights()[i];
  }
  return SignedMeasure(a.space(), std::move(w));
}

SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b) {
  require_same_space(a.space(), b.space(), "measure difference");
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = a.weights()[i] - b.weights()[i];
  }
  return SignedMeasure(a.space(), std::move(w));
}

SignedMeasure operator*(double scale, const SignedMeasure& m) {
  std::vector<double> w(m.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale * m.weights()[i];
  return SignedMeasure(m.space(), std::move(w));
}

ProbMeasure::ProbMeasure(AtomSpace space, std::vector<double> weights)
    : measure_(std::move(space), std::move(weights)) {
  for (double w : measure_.weights()) {
    if (w < 0.0) {
      throw std::invalid_argument(
          "ProbMeasure: negative weight " + format_double(w));
    }
  }
  const double total = measure_.mass();
  if (std::abs(total - 1.0) > kMassTol) {
    throw std::invalid_argument("ProbMeasure: total mass " +
                                format_double(total) +
                                " outside tolerance of 1");
  }
}

ProbMeasure ProbMeasure::normalized(AtomSpace space,
                                    std::vector<double> weights) {
  NeumaierSum s;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("ProbMeasure::normalized: negative weight");
    }
    s.add(w);
  }
  const double total = s.value();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument(
        "ProbMeasure::normalized: total mass must be positive and finite");
  }
  for (double& w : weights) w /= total;
  return ProbMeasure(std::move(space), std::move(weights));
}

ProbMeasure ProbMeasure::point_mass(AtomSpace space, std::uint32_t atom) {
  std::vector<double> w(space.size(), 0.0);
  w.at(atom) = 1.0;
  return ProbMeasure(std::move(space), std::move(w));
}

ProbMeasure ProbMeasure::uniform(AtomSpace space) {
  std::vector<double> w(space.size(), 1.0 / static_cast<double>(space.size()));
  return ProbMeasure(std::move(space), std::move(w));
}

SignedMeasure operator-(const ProbMeasure& a, const ProbMeasure& b) {
  return a.as_signed() - b.as_signed();
}

Partition::Partition(AtomSpace space,
                     std::vector<std::vector<std::uint32_t>> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  std::vector<bool> seen(space_.size(), false);
  std::size_t covered = 0;
  for (const auto& block : blocks_) {
    if (block.empty()) {
      throw std::invalid_argument("Partition: empty block");
    }
    for (std::uint32_t atom : block) {
      if (atom >= space_.size()) {
        throw std::invalid_argument("Partition: atom index out of range");
      }
      if (seen[atom]) {
        throw std::invalid_argument("Partition: blocks overlap at atom '" +
                                    space_.label(atom) + "'");
      }
      seen[atom] = true;
      ++covered;
    }
  }
  if (covered != space_.size()) {
    throw std::invalid_argument("Partition: blocks do not cover the space");
  }
}

Partition Partition::trivial(AtomSpace space) {
  std::vector<std::uint32_t> all(space.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return Partition(std::move(space), {std::move(all)});
}

Partition Partition::singletons(AtomSpace space) {
  std::vector<std::vector<std::uint32_t>> blocks;
  blocks.reserve(space.size());
  for (std::uint32_t i = 0; i < space.size(); ++i) blocks.push_back({i});
  return Partition(std::move(space), std::move(blocks));
}

HahnJordan hahn_jordan(const SignedMeasure& m) {
  std::vector<double> pos(m.size(), 0.0);
  std::vector<double> neg(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double w = m.weights()[i];
    if (w > 0.0) {
      pos[i] = w;
    } else if (w < 0.0) {
      neg[i] = -w;
    }
  }
  return HahnJordan{SignedMeasure(m.space(), std::move(pos)),
                    SignedMeasure(m.space(), std::move(neg))};
}

double tv_norm(const SignedMeasure& m) { return sum_abs(m.weights()); }

double tv_norm(const ProbMeasure& a, const ProbMeasure& b) {
  return tv_norm(a - b);
}

SignedMeasure meet(const SignedMeasure& a, const SignedMeasure& b) {
  require_same_space(a.space(), b.space(), "meet");
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::min(a.weights()[i], b.weights()[i]);
  }
  return SignedMeasure(a.space(), std::move(w));
}

SignedMeasure meet(const ProbMeasure& a, const ProbMeasure& b) {
  return meet(a.as_signed(), b.as_signed());
}

double meet_mass(const ProbMeasure& a, const ProbMeasure& b) {
  require_same_space(a.space(), b.space(), "meet_mass");
  NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s.add(std::min(a.weights()[i], b.weights()[i]));
  }
  return s.value();
}

MeetTvIdentity meet_tv_identity_check(const ProbMeasure& a,
                                      const ProbMeasure& b) {
  return MeetTvIdentity{meet_mass(a, b), 1.0 - 0.5 * tv_norm(a - b)};
}

SignedMeasure image_measure(
    const SignedMeasure& m,
    const std::function<std::uint32_t(std::uint32_t)>& map,
    const AtomSpace& target) {
  std::vector<double> w(target.size(), 0.0);
  for (std::uint32_t i = 0; i < m.size(); ++i) {
    const double v = m.weights()[i];
    if (v == 0.0) continue;
    const std::uint32_t j = map(i);
    if (j >= target.size()) {
      throw std::invalid_argument(
          "image_measure: map sends atom '" + m.space().label(i) +
          "' outside the target space");
    }
    w[j] += v;
  }
  return SignedMeasure(target, std::move(w));
}

double tv_distance_on_partition(const ProbMeasure& a, const ProbMeasure& b,
                                const Partition& partition) {
  require_same_space(a.space(), b.space(), "tv_distance_on_partition");
  if (!partition.space().same_as(a.space())) {
    throw std::invalid_argument(
        "tv_distance_on_partition: partition is over a different space");
  }
  NeumaierSum total;
  for (const auto& block : partition.blocks()) {
    NeumaierSum diff;
    for (std::uint32_t atom : block) {
      diff.add(a.weight(atom) - b.weight(atom));
    }
    total.add(std::abs(diff.value()));
  }
  return total.value();
}

}  // namespace tvbound
