#pragma once

#include <cstdint>
#include <vector>

#include "tvbound/measure.hpp"

namespace tvbound {

/// Stochastic kernel on finite spaces: one probability row per source atom.
/// Immutable after construction.
class FiniteKernel {
 public:
  FiniteKernel(AtomSpace source, AtomSpace target, std::vector<ProbMeasure> rows);

  /// Builds rows from a row-major matrix (one row per source atom).
  static FiniteKernel from_matrix(AtomSpace source, AtomSpace target,
                                  const std::vector<std::vector<double>>& rows);

  /// Kernel ignoring its source atom (every row equals `row`).
  static FiniteKernel constant(AtomSpace source, ProbMeasure row);

  /// Deterministic identity kernel on a space.
  static FiniteKernel identity(const AtomSpace& space);

  const AtomSpace& source() const { return source_; }
  const AtomSpace& target() const { return target_; }
  const ProbMeasure& row(std::uint32_t source_atom) const;
  std::size_t source_size() const { return rows_.size(); }

 private:
  AtomSpace source_;
  AtomSpace target_;
  std::vector<ProbMeasure> rows_;
};

/// sup over source atoms of the row total variation distance. A pseudometric
/// on kernels sharing source and target; values lie in [0, 2].
double kernel_tv_distance(const FiniteKernel& a, const FiniteKernel& b);

/// inf over source atoms of the row overlap ||a_x ^ b_x||. Computed directly
/// from the rows (not via the TV identity), so the rowwise duality
/// overlap + tv/2 = 1 stays an independent cross-check.
double kernel_overlap_inf(const FiniteKernel& a, const FiniteKernel& b);

/// Kernel in density form: K_x(dy) = density(x, y) * base(dy) for a fixed
/// base probability measure on the target space.
class DensityKernel {
 public:
  /// `density` is row-major with one row per source atom; each row must
  /// integrate to 1 against `base` within the probability-mass tolerance.
  DensityKernel(AtomSpace source, AtomSpace target, ProbMeasure base,
                std::vector<double> density);

  const AtomSpace& source() const { return source_; }
  const AtomSpace& target() const { return target_; }
  const ProbMeasure& base() const { return base_; }
  double density(std::uint32_t source_atom, std::uint32_t target_atom) const;

  /// True when both kernels integrate against the same base measure
  /// (same space and exactly equal weights).
  bool shares_base(const DensityKernel& other) const;

 private:
  AtomSpace source_;
  AtomSpace target_;
  ProbMeasure base_;
  std::vector<double> density_;
};

/// Materializes the density form into explicit rows.
FiniteKernel density_to_finite(const DensityKernel& kernel);

/// Inverse of density_to_finite for a strictly positive base measure.
DensityKernel finite_to_density(const FiniteKernel& kernel, ProbMeasure base);

struct ProductOverlapCheck {
  double lhs;  // overlap of the two product measures
  double rhs;  // overlap of the initial measures times the row-overlap inf
};

/// Both sides of the product-overlap inequality lhs >= rhs for kernels given
/// in density form with a shared base measure. The left side is computed by
/// exact product-measure enumeration.
ProductOverlapCheck product_overlap_check(const ProbMeasure& mu,
                                          const ProbMeasure& mu_alt,
                                          const DensityKernel& kernel,
                                          const DensityKernel& kernel_alt);

}  // namespace tvbound
