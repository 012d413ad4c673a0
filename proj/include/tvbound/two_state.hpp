#pragma once

#include <cstddef>
#include <utility>

#include "tvbound/product.hpp"

namespace tvbound {

/// Parameters of the closed-form two-state example: a chain that starts in
/// state 1 with probability p and never moves (identity kernel), against a
/// perturbed chain whose initial probability is shifted by delta and whose
/// kernel flips the state with probability eps each step.
struct TwoStateSpec {
  double p;      // initial probability of state 1, in [0, 1]
  double eps;    // flip probability of the perturbed kernel, in (0, 1)
  double delta;  // initial perturbation, in (p-1, p)
  std::size_t n; // horizon

  TwoStateSpec(double p, double eps, double delta, std::size_t n);
};

/// The three parameter regimes of the exact TV formula. The regime depends
/// on where delta sits relative to +-t(n), with t(n) = f_n / (1 - f_n) and
/// f_n = 1 - (1-eps)^n:
///   A: delta < -p t(n),           TV = 2((1-p) f_n - delta (1-f_n))
///   B: -p t(n) <= delta <= (1-p) t(n),  TV = 2 f_n
///   C: delta > (1-p) t(n),        TV = 2(p f_n + delta (1-f_n))
/// Boundary equalities fall into B; the adjacent formulas agree there.
enum class CaseLabel { A, B, C };

struct CaseResult {
  CaseLabel label;
  double f_n;       // 1 - (1-eps)^n
  double exact_tv;  // exact TV between the two horizon-n product measures
  double bound;     // 2(f_n + |delta| (1-f_n)), the multiplicative bound with
                    // the exact per-step constants 2|delta|, 2eps, ..., 2eps
};

CaseResult classify_case(const TwoStateSpec& spec);

char case_label_char(CaseLabel label);

/// The two kernel sequences of the example over the space {"0", "1"}:
/// identity steps for the nominal chain, symmetric eps-flip steps for the
/// perturbed one. Enumerating them reproduces classify_case exactly.
std::pair<KernelSequence, KernelSequence> build_chain(const TwoStateSpec& spec);

/// Smallest horizon N such that regime B holds for every n >= N (it holds
/// monotonically: t(n) increases strictly to infinity). Requires p in (0, 1)
/// so that N is finite for every admissible delta.
std::size_t case_b_threshold(double p, double eps, double delta);

}  // namespace tvbound
