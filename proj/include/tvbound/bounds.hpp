#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tvbound/product.hpp"

namespace tvbound {

/// Per-step ceilings c_0..c_n on the kernel TV distances. Each entry lies in
/// [0, 2]; magnitudes within dust of the range ends are clamped onto them.
class PerturbationBudget {
 public:
  explicit PerturbationBudget(std::vector<double> constants);

  std::span<const double> constants() const { return constants_; }
  std::size_t size() const { return constants_.size(); }

 private:
  std::vector<double> constants_;
};

/// Sum of the budget constants. Deliberately not clipped at 2, so the
/// divergence of the linear bound with the horizon stays visible; consumers
/// may min with 2.
double linear_bound(const PerturbationBudget& budget);

/// 2 - 2 * prod(1 - c_k / 2). Always in [0, 2] and never above the linear
/// bound.
double multiplicative_bound(const PerturbationBudget& budget);

/// prod(a_k) for stepwise overlaps a_k in [0, 1]: a lower bound on the
/// overlap of the two product measures.
double overlap_lower_bound(std::span<const double> overlaps);

struct BoundComparison {
  double multiplicative;
  double linear;
};

/// Both bounds for the same budget; multiplicative <= linear always.
BoundComparison bound_comparison_check(const PerturbationBudget& budget);

/// Which histories the per-step kernel scan ranges over.
enum class BudgetScope {
  reachable,  // only histories of positive probability under either chain
  all,        // every syntactic history
};

struct ReportOptions {
  bool exact = false;  // also enumerate the products and take the exact TV
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  BudgetScope scope = BudgetScope::reachable;
};

/// Bundle of the perturbation analysis for one horizon. Construction enforces
/// multiplicative <= linear and, when present, exact <= multiplicative.
struct BoundReport {
  std::size_t horizon;
  std::optional<double> exact_tv;
  double linear;
  double multiplicative;
  double overlap_lower;  // product of the stepwise overlaps
  PerturbationBudget budgets;

  BoundReport(std::size_t horizon, std::optional<double> exact_tv,
              double linear, double multiplicative, double overlap_lower,
              PerturbationBudget budgets);
};

/// Assembles the report for two kernel sequences at a horizon: budgets are
/// the exact per-step kernel TV distances (sup over histories, restricted to
/// reachable ones by default), overlaps the per-step row-overlap infima, and
/// the exact TV comes from full enumeration when requested and affordable.
BoundReport make_report(const KernelSequence& seq,
                        const KernelSequence& seq_alt, std::size_t horizon,
                        const ReportOptions& options = {});

}  // namespace tvbound
