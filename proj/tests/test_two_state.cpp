#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tvbound/two_state.hpp"

using namespace tvbound;

namespace {

bool approx(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

// direct scan oracle for the regime threshold
std::size_t scan_threshold(double p, double eps, double delta,
                           std::size_t limit = 2000) {
  std::size_t first = limit;
  for (std::size_t n = 0; n <= limit; ++n) {
    if (classify_case(TwoStateSpec(p, eps, delta, n)).label == CaseLabel::B) {
      first = n;
      break;
    }
  }
  // regime B is monotone in n; make sure the scan agrees
  for (std::size_t n = first; n <= first + 20; ++n) {
    REQUIRE(classify_case(TwoStateSpec(p, eps, delta, n)).label ==
            CaseLabel::B);
  }
  return first;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(TwoStateSpec(-0.1, 0.1, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TwoStateSpec(0.5, 0.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TwoStateSpec(0.5, 1.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TwoStateSpec(0.5, 0.1, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(TwoStateSpec(0.5, 0.1, -0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(TwoStateSpec(1.0, 0.1, 0.0, 1), std::invalid_argument);
  CHECK_NOTHROW(TwoStateSpec(1.0, 0.1, 0.5, 1));
  CHECK_NOTHROW(TwoStateSpec(0.0, 0.1, -0.5, 1));
}

TEST_CASE("regime B with delta = 0: bound attained exactly") {
  const CaseResult r = classify_case(TwoStateSpec(0.5, 0.1, 0.0, 2));
  CHECK(r.label == CaseLabel::B);
  CHECK(approx(r.f_n, 0.19));
  CHECK(approx(r.exact_tv, 0.38));
  CHECK(r.bound == r.exact_tv);  // bit-exact tightness
}

TEST_CASE("regime C with p = 1: bound attained exactly") {
  const CaseResult r = classify_case(TwoStateSpec(1.0, 0.1, 0.3, 1));
  CHECK(r.label == CaseLabel::C);
  CHECK(approx(r.exact_tv, 0.74));
  CHECK(r.bound == r.exact_tv);
}

TEST_CASE("horizon zero reduces to the initial TV") {
  const CaseResult c = classify_case(TwoStateSpec(0.5, 0.1, 0.2, 0));
  CHECK(c.label == CaseLabel::C);
  CHECK(approx(c.exact_tv, 0.4));
  CHECK(c.f_n == 0.0);

  const CaseResult b = classify_case(TwoStateSpec(0.5, 0.1, 0.0, 0));
  CHECK(b.label == CaseLabel::B);
  CHECK(b.exact_tv == 0.0);

  const CaseResult a = classify_case(TwoStateSpec(0.5, 0.1, -0.2, 0));
  CHECK(a.label == CaseLabel::A);
  CHECK(approx(a.exact_tv, 0.4));
}

TEST_CASE("exactly representable regime boundaries classify as B") {
  // eps = 0.5, n = 1 puts both f and 1-f at 0.5, so the boundary deltas
  // -p and (1-p) are exact dyadic numbers and the non-strict comparisons
  // resolve without rounding
  const CaseResult lower = classify_case(TwoStateSpec(0.25, 0.5, -0.25, 1));
  CHECK(lower.label == CaseLabel::B);
  CHECK(approx(lower.exact_tv, 2.0 * ((1.0 - 0.25) * 0.5 - (-0.25) * 0.5)));

  const CaseResult upper = classify_case(TwoStateSpec(0.75, 0.5, 0.25, 1));
  CHECK(upper.label == CaseLabel::B);
  CHECK(approx(upper.exact_tv, 2.0 * (0.75 * 0.5 + 0.25 * 0.5)));
}

TEST_CASE("adjacent formulas agree at the regime boundaries") {
  // the float image of a boundary delta may land on either side of the
  // strict comparison; what matters is that the formulas agree there
  const double p = 0.6;
  const double eps = 0.1;
  const std::size_t n = 2;
  const double stay = std::pow(1.0 - eps, static_cast<double>(n));
  const double f = 1.0 - stay;

  const double upper = (1.0 - p) * f / stay;
  const CaseResult at_upper = classify_case(TwoStateSpec(p, eps, upper, n));
  CHECK(at_upper.label != CaseLabel::A);
  CHECK(approx(at_upper.exact_tv, 2.0 * (p * f + upper * stay)));
  CHECK(approx(at_upper.exact_tv, 2.0 * f));

  const double lower = -p * f / stay;
  const CaseResult at_lower = classify_case(TwoStateSpec(p, eps, lower, n));
  CHECK(at_lower.label != CaseLabel::C);
  CHECK(approx(at_lower.exact_tv, 2.0 * ((1.0 - p) * f - lower * stay)));
  CHECK(approx(at_lower.exact_tv, 2.0 * f));
}

TEST_CASE("f_n is strictly increasing in n and eps") {
  double previous = -1.0;
  for (std::size_t n = 0; n <= 30; ++n) {
    const double f = classify_case(TwoStateSpec(0.5, 0.2, 0.0, n)).f_n;
    CHECK(f > previous);
    CHECK(f >= 0.0);
    CHECK(f < 1.0);
    previous = f;
  }
  previous = -1.0;
  for (double eps = 0.05; eps < 1.0; eps += 0.05) {
    const double f = classify_case(TwoStateSpec(0.5, eps, 0.0, 5)).f_n;
    CHECK(f > previous);
    previous = f;
  }
}

TEST_CASE("built chains reproduce the closed form by enumeration") {
  const double grid_p[] = {0.0, 0.3, 0.7, 1.0};
  const double grid_eps[] = {0.05, 0.2, 0.6};
  const double grid_delta[] = {-0.5, -0.1, 0.0, 0.1, 0.5};
  for (double p : grid_p) {
    for (double eps : grid_eps) {
      for (double delta : grid_delta) {
        if (delta <= p - 1.0 || delta >= p) continue;
        for (std::size_t n : {0, 1, 3, 8}) {
          const TwoStateSpec spec(p, eps, delta, n);
          const CaseResult r = classify_case(spec);
          const auto [seq, seq_alt] = build_chain(spec);
          const double tv = trajectory_tv(ionescu_tulcea(seq, n),
                                          ionescu_tulcea(seq_alt, n));
          CHECK(approx(tv, r.exact_tv));
          CHECK(r.exact_tv <= r.bound + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("built chain kernels match the construction") {
  const auto [seq, seq_alt] = build_chain(TwoStateSpec(0.3, 0.25, 0.1, 2));
  CHECK(seq.initial().weight(1) == 0.3);
  CHECK(approx(seq_alt.initial().weight(1), 0.2, 1e-15));
  CHECK(seq.step(1).kernel.row(0).weight(0) == 1.0);
  CHECK(seq.step(2).kernel.row(1).weight(1) == 1.0);
  CHECK(seq_alt.step(1).kernel.row(0).weight(1) == 0.25);
  CHECK(seq_alt.step(2).kernel.row(1).weight(0) == 0.25);
}

TEST_CASE("regime A instance matches enumeration") {
  const TwoStateSpec spec(0.7, 0.2, -0.25, 1);
  const CaseResult r = classify_case(spec);
  CHECK(r.label == CaseLabel::A);
  const auto [seq, seq_alt] = build_chain(spec);
  CHECK(approx(trajectory_tv(ionescu_tulcea(seq, 1), ionescu_tulcea(seq_alt, 1)),
               r.exact_tv));
}

TEST_CASE("threshold: zero perturbation is regime B from the start") {
  CHECK(case_b_threshold(0.5, 0.1, 0.0) == 0);
  CHECK(case_b_threshold(0.2, 0.7, 0.0) == 0);
}

TEST_CASE("threshold matches the scan oracle on a frozen instance") {
  // smallest n with 0.4 <= 0.5 (1/0.9^n - 1): n = 6
  CHECK(case_b_threshold(0.5, 0.1, 0.4) == 6);
  CHECK(case_b_threshold(0.5, 0.1, 0.4) == scan_threshold(0.5, 0.1, 0.4));
}

TEST_CASE("threshold matches the scan oracle across the parameter box") {
  const double grid_p[] = {0.1, 0.35, 0.5, 0.8, 0.95};
  const double grid_eps[] = {0.05, 0.15, 0.4, 0.8};
  const double grid_ratio[] = {-0.95, -0.4, 0.3, 0.9};  // of the valid range
  for (double p : grid_p) {
    for (double eps : grid_eps) {
      for (double ratio : grid_ratio) {
        const double delta = ratio > 0 ? ratio * p * 0.999
                                       : ratio * (1.0 - p) * 0.999;
        const std::size_t threshold = case_b_threshold(p, eps, delta);
        CHECK(threshold == scan_threshold(p, eps, delta));
        if (threshold > 0) {
          CHECK(classify_case(TwoStateSpec(p, eps, delta, threshold - 1)).label !=
                CaseLabel::B);
        }
      }
    }
  }
}

TEST_CASE("threshold requires p strictly inside (0, 1)") {
  CHECK_THROWS_AS(case_b_threshold(1.0, 0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(case_b_threshold(0.0, 0.1, -0.5), std::invalid_argument);
}

TEST_CASE("past the threshold the exact TV does not depend on delta") {
  const double p = 0.6;
  const double eps = 0.15;
  const double deltas[] = {-0.35, -0.1, 0.0, 0.2, 0.55};
  std::size_t threshold = 0;
  for (double delta : deltas) {
    threshold = std::max(threshold, case_b_threshold(p, eps, delta));
  }
  for (std::size_t n = threshold; n <= threshold + 10; ++n) {
    const double reference = classify_case(TwoStateSpec(p, eps, 0.0, n)).exact_tv;
    for (double delta : deltas) {
      const CaseResult r = classify_case(TwoStateSpec(p, eps, delta, n));
      CHECK(r.label == CaseLabel::B);
      CHECK(r.exact_tv == reference);  // identical formula, bit-identical
    }
  }
}
