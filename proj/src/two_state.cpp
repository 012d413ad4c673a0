#include "tvbound/two_state.hpp"

#include <cmath>
#include <stdexcept>

#include "tvbound/numeric.hpp"

namespace tvbound {

namespace {

// Regime test without dividing by (1 - f): multiplying the threshold
// inequalities through by (1 - f) > 0 keeps them well defined even when
// (1-eps)^n underflows to zero, where regime B holds for every delta.
bool below_case_b(double p, double delta, double f, double one_minus_f) {
  return delta * one_minus_f < -p * f;
}

bool above_case_b(double p, double delta, double f, double one_minus_f) {
  return delta * one_minus_f > (1.0 - p) * f;
}

bool is_case_b(double p, double eps, double delta, std::size_t n) {
  const double one_minus_f = std::pow(1.0 - eps, static_cast<double>(n));
  const double f = 1.0 - one_minus_f;
  return !below_case_b(p, delta, f, one_minus_f) &&
         !above_case_b(p, delta, f, one_minus_f);
}

}  // namespace

TwoStateSpec::TwoStateSpec(double p, double eps, double delta, std::size_t n)
    : p(p), eps(eps), delta(delta), n(n) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw std::invalid_argument("TwoStateSpec: p must lie in [0, 1]");
  }
  if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
    throw std::invalid_argument("TwoStateSpec: eps must lie in (0, 1)");
  }
  if (!std::isfinite(delta) || delta <= p - 1.0 || delta >= p) {
    throw std::invalid_argument(
        "TwoStateSpec: delta must lie in (p-1, p) so both initial measures "
        "are valid");
  }
}

CaseResult classify_case(const TwoStateSpec& spec) {
  const double one_minus_f =
      std::pow(1.0 - spec.eps, static_cast<double>(spec.n));
  const double f = 1.0 - one_minus_f;
  const double bound = 2.0 * (f + std::abs(spec.delta) * one_minus_f);

  CaseLabel label;
  double exact;
  if (below_case_b(spec.p, spec.delta, f, one_minus_f)) {
    label = CaseLabel::A;
    exact = 2.0 * ((1.0 - spec.p) * f - spec.delta * one_minus_f);
  } else if (above_case_b(spec.p, spec.delta, f, one_minus_f)) {
    label = CaseLabel::C;
    exact = 2.0 * (spec.p * f + spec.delta * one_minus_f);
  } else {
    label = CaseLabel::B;
    exact = 2.0 * f;
  }
  return CaseResult{label, f, exact, bound};
}

char case_label_char(CaseLabel label) {
  switch (label) {
    case CaseLabel::A: return 'A';
    case CaseLabel::B: return 'B';
    case CaseLabel::C: return 'C';
  }
  return '?';
}

std::pair<KernelSequence, KernelSequence> build_chain(
    const TwoStateSpec& spec) {
  const AtomSpace space = AtomSpace::range(2);

  const ProbMeasure initial(space, {1.0 - spec.p, spec.p});
  const double p_alt = spec.p - spec.delta;
  const ProbMeasure initial_alt(space, {1.0 - p_alt, p_alt});

  const FiniteKernel stay = FiniteKernel::identity(space);
  const FiniteKernel flip = FiniteKernel::from_matrix(
      space, space,
      {{1.0 - spec.eps, spec.eps}, {spec.eps, 1.0 - spec.eps}});

  std::vector<KernelStep> steps;
  std::vector<KernelStep> steps_alt;
  steps.reserve(spec.n);
  steps_alt.reserve(spec.n);
  for (std::size_t k = 0; k < spec.n; ++k) {
    steps.push_back(KernelStep{stay, StepKind::markov});
    steps_alt.push_back(KernelStep{flip, StepKind::markov});
  }
  return {KernelSequence(initial, std::move(steps)),
          KernelSequence(initial_alt, std::move(steps_alt))};
}

std::size_t case_b_threshold(double p, double eps, double delta) {
  if (!std::isfinite(p) || p <= 0.0 || p >= 1.0) {
    throw std::invalid_argument("case_b_threshold: p must lie in (0, 1)");
  }
  if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
    throw std::invalid_argument("case_b_threshold: eps must lie in (0, 1)");
  }
  if (!std::isfinite(delta) || delta <= p - 1.0 || delta >= p) {
    throw std::invalid_argument("case_b_threshold: delta must lie in (p-1, p)");
  }
  if (delta == 0.0) return 0;

  // closed-form guess, then snap to the classification predicate so float
  // dust at the boundary cannot shift the answer off by one
  const double ratio =
      delta > 0.0 ? delta / (1.0 - p) : -delta / p;
  const double raw = std::log1p(ratio) / -std::log1p(-eps);
  std::size_t n = raw <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(raw));

  while (n > 0 && is_case_b(p, eps, delta, n - 1)) --n;
  while (!is_case_b(p, eps, delta, n)) ++n;
  return n;
}

}  // namespace tvbound
