#include "tvbound/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvbound/numeric.hpp"
#include "tvbound/product.hpp"

namespace tvbound {

namespace {

void require_comparable(const FiniteKernel& a, const FiniteKernel& b,
                        const char* op) {
  if (!a.source().same_as(b.source()) || !a.target().same_as(b.target())) {
    throw std::invalid_argument(std::string(op) +
                                ": kernels live on incompatible spaces");
  }
}

}  // namespace

FiniteKernel::FiniteKernel(AtomSpace source, AtomSpace target,
                           std::vector<ProbMeasure> rows)
    : source_(std::move(source)), target_(std::move(target)),
      rows_(std::move(rows)) {
  if (rows_.size() != source_.size()) {
    throw std::invalid_argument(
        "FiniteKernel: need exactly one row per source atom");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!rows_[i].space().same_as(target_)) {
      throw std::invalid_argument("FiniteKernel: row for source atom '" +
                                  source_.label(static_cast<std::uint32_t>(i)) +
                                  "' is not a measure on the target space");
    }
  }
}

FiniteKernel FiniteKernel::from_matrix(
    AtomSpace source, AtomSpace target,
    const std::vector<std::vector<double>>& rows) {
  std::vector<ProbMeasure> measures;
  measures.reserve(rows.size());
  for (const auto& row : rows) {
    measures.emplace_back(target, row);
  }
  return FiniteKernel(std::move(source), std::move(target),
                      std::move(measures));
}

FiniteKernel FiniteKernel::constant(AtomSpace source, ProbMeasure row) {
  std::vector<ProbMeasure> rows(source.size(), row);
  return FiniteKernel(std::move(source), row.space(), std::move(rows));
}

FiniteKernel FiniteKernel::identity(const AtomSpace& space) {
  std::vector<ProbMeasure> rows;
  rows.reserve(space.size());
  for (std::uint32_t i = 0; i < space.size(); ++i) {
    rows.push_back(ProbMeasure::point_mass(space, i));
  }
  return FiniteKernel(space, space, std::move(rows));
}

const ProbMeasure& FiniteKernel::row(std::uint32_t source_atom) const {
  return rows_.at(source_atom);
}

double kernel_tv_distance(const FiniteKernel& a, const FiniteKernel& b) {
  require_comparable(a, b, "kernel_tv_distance");
  double worst = 0.0;
  for (std::uint32_t x = 0; x < a.source_size(); ++x) {
    worst = std::max(worst, tv_norm(a.row(x) - b.row(x)));
  }
  return worst;
}

double kernel_overlap_inf(const FiniteKernel& a, const FiniteKernel& b) {
  require_comparable(a, b, "kernel_overlap_inf");
  double worst = 1.0;
  for (std::uint32_t x = 0; x < a.source_size(); ++x) {
    worst = std::min(worst, meet_mass(a.row(x), b.row(x)));
  }
  return worst;
}

DensityKernel::DensityKernel(AtomSpace source, AtomSpace target,
                             ProbMeasure base, std::vector<double> density)
    : source_(std::move(source)), target_(std::move(target)),
      base_(std::move(base)), density_(std::move(density)) {
  if (!base_.space().same_as(target_)) {
    throw std::invalid_argument(
        "DensityKernel: base measure must live on the target space");
  }
  if (density_.size() != source_.size() * target_.size()) {
    throw std::invalid_argument(
        "DensityKernel: density table has the wrong shape");
  }
  for (std::uint32_t x = 0; x < source_.size(); ++x) {
    NeumaierSum row_mass;
    for (std::uint32_t y = 0; y < target_.size(); ++y) {
      const double d = density_[x * target_.size() + y];
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument(
            "DensityKernel: density values must be finite and nonnegative");
      }
      row_mass.add(d * base_.weight(y));
    }
    if (std::abs(row_mass.value() - 1.0) > kMassTol) {
      throw std::invalid_argument(
          "DensityKernel: row for source atom '" + source_.label(x) +
          "' integrates to " + format_double(row_mass.value()) +
          " against the base measure");
    }
  }
}

double DensityKernel::density(std::uint32_t source_atom,
                              std::uint32_t target_atom) const {
  if (source_atom >= source_.size() || target_atom >= target_.size()) {
    throw std::invalid_argument("DensityKernel::density: atom out of range");
  }
  return density_[source_atom * target_.size() + target_atom];
}

bool DensityKernel::shares_base(const DensityKernel& other) const {
  if (!base_.space().same_as(other.base_.space())) return false;
  return std::equal(base_.weights().begin(), base_.weights().end(),
                    other.base_.weights().begin(), other.base_.weights().end());
}

FiniteKernel density_to_finite(const DensityKernel& kernel) {
  std::vector<ProbMeasure> rows;
  rows.reserve(kernel.source().size());
  for (std::uint32_t x = 0; x < kernel.source().size(); ++x) {
    std::vector<double> w(kernel.target().size());
    for (std::uint32_t y = 0; y < kernel.target().size(); ++y) {
      w[y] = kernel.density(x, y) * kernel.base().weight(y);
    }
    try {
      rows.emplace_back(kernel.target(), std::move(w));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(
          "density_to_finite: row for source atom '" +
          kernel.source().label(x) + "' is not a probability measure (" +
          e.what() + ")");
    }
  }
  return FiniteKernel(kernel.source(), kernel.target(), std::move(rows));
}

DensityKernel finite_to_density(const FiniteKernel& kernel, ProbMeasure base) {
  if (!base.space().same_as(kernel.target())) {
    throw std::invalid_argument(
        "finite_to_density: base measure must live on the kernel target");
  }
  std::vector<double> density(kernel.source_size() * kernel.target().size());
  for (std::uint32_t x = 0; x < kernel.source_size(); ++x) {
    for (std::uint32_t y = 0; y < kernel.target().size(); ++y) {
      const double row_w = kernel.row(x).weight(y);
      const double base_w = base.weight(y);
      if (base_w == 0.0) {
        if (row_w != 0.0) {
          throw std::invalid_argument(
              "finite_to_density: row at '" + kernel.source().label(x) +
              "' puts mass on atom '" + kernel.target().label(y) +
              "' where the base measure vanishes");
        }
        density[x * kernel.target().size() + y] = 0.0;
      } else {
        density[x * kernel.target().size() + y] = row_w / base_w;
      }
    }
  }
  return DensityKernel(kernel.source(), kernel.target(), std::move(base),
                       std::move(density));
}

ProductOverlapCheck product_overlap_check(const ProbMeasure& mu,
                                          const ProbMeasure& mu_alt,
                                          const DensityKernel& kernel,
                                          const DensityKernel& kernel_alt) {
  if (!kernel.shares_base(kernel_alt)) {
    throw std::invalid_argument(
        "product_overlap_check: kernels must share the same base measure");
  }
  if (!kernel.source().same_as(kernel_alt.source()) ||
      !kernel.target().same_as(kernel_alt.target())) {
    throw std::invalid_argument(
        "product_overlap_check: kernels live on incompatible spaces");
  }
  if (!mu.space().same_as(kernel.source()) ||
      !mu_alt.space().same_as(kernel.source())) {
    throw std::invalid_argument(
        "product_overlap_check: initial measures must live on the kernel "
        "source space");
  }
  const FiniteKernel k = density_to_finite(kernel);
  const FiniteKernel k_alt = density_to_finite(kernel_alt);
  const TrajectoryMeasure q = product_measure(mu, k);
  const TrajectoryMeasure q_alt = product_measure(mu_alt, k_alt);
  const double lhs = trajectory_meet_mass(q, q_alt);
  const double rhs = meet_mass(mu, mu_alt) * kernel_overlap_inf(k, k_alt);
  return ProductOverlapCheck{lhs, rhs};
}

}  // namespace tvbound
