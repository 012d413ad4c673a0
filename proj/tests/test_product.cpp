#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tvbound/product.hpp"
#include "tvbound/two_state.hpp"

#include "support/brute.hpp"
#include "support/generators.hpp"

using namespace tvbound;

namespace {

bool approx(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

double weight_of(const TrajectoryMeasure& t,
                 std::initializer_list<std::uint32_t> tuple) {
  const std::vector<std::uint32_t> key(tuple);
  return t.weight_of(key);
}

brute::Dist to_dist(const TrajectoryMeasure& t) {
  brute::Dist d;
  for (std::size_t i = 0; i < t.support_size(); ++i) {
    const auto tup = t.tuple(i);
    d[brute::Tuple(tup.begin(), tup.end())] = t.weight_at(i);
  }
  return d;
}

KernelSequence uniform_chain(std::size_t states, std::size_t steps) {
  const AtomSpace space = AtomSpace::range(states);
  std::vector<KernelStep> kernel_steps(
      steps,
      KernelStep{FiniteKernel::constant(space, ProbMeasure::uniform(space)),
                 StepKind::markov});
  return KernelSequence(ProbMeasure::uniform(space), std::move(kernel_steps));
}

}  // namespace

TEST_CASE("product measure of measure and kernel") {
  const AtomSpace s = AtomSpace::range(2);
  const ProbMeasure mu(s, {0.5, 0.5});

  // constant kernel gives the independent product
  const ProbMeasure rho(s, {0.3, 0.7});
  const TrajectoryMeasure indep =
      product_measure(mu, FiniteKernel::constant(s, rho));
  CHECK(approx(weight_of(indep, {0, 1}), 0.35, 1e-15));
  CHECK(approx(weight_of(indep, {1, 0}), 0.15, 1e-15));

  // point-mass initial lifts one kernel row
  const TrajectoryMeasure lifted = product_measure(
      ProbMeasure::point_mass(s, 1), FiniteKernel::constant(s, rho));
  CHECK(lifted.support_size() == 2);
  CHECK(weight_of(lifted, {1, 0}) == 0.3);
  CHECK(weight_of(lifted, {1, 1}) == 0.7);

  // identity kernel concentrates on the diagonal
  const TrajectoryMeasure diag =
      product_measure(mu, FiniteKernel::identity(s));
  CHECK(diag.support_size() == 2);
  CHECK(weight_of(diag, {0, 0}) == 0.5);
  CHECK(weight_of(diag, {1, 1}) == 0.5);

  CHECK_THROWS_AS(
      product_measure(ProbMeasure::uniform(AtomSpace::range(3)),
                      FiniteKernel::identity(s)),
      std::invalid_argument);
}

TEST_CASE("product measure marginals recover the factors") {
  testgen::Gen gen(711);
  const AtomSpace space = AtomSpace::range(4);
  for (int rep = 0; rep < 100; ++rep) {
    const ProbMeasure mu = gen.prob(space);
    const FiniteKernel k = gen.markov_kernel(space);
    const TrajectoryMeasure q = product_measure(mu, k);

    const std::size_t first_coord[] = {0};
    const TrajectoryMeasure first = marginal(q, first_coord);
    for (std::uint32_t x = 0; x < space.size(); ++x) {
      CHECK(approx(first.weight_of(std::vector<std::uint32_t>{x}),
                   mu.weight(x), 1e-15));
    }

    const std::size_t second_coord[] = {1};
    const TrajectoryMeasure second = marginal(q, second_coord);
    for (std::uint32_t y = 0; y < space.size(); ++y) {
      double want = 0.0;
      for (std::uint32_t x = 0; x < space.size(); ++x) {
        want += mu.weight(x) * k.row(x).weight(y);
      }
      CHECK(approx(second.weight_of(std::vector<std::uint32_t>{y}), want,
                   1e-14));
    }
  }
}

TEST_CASE("iterated products: base case and deterministic chains") {
  const AtomSpace s = AtomSpace::range(2);
  const ProbMeasure mu(s, {0.5, 0.5});

  // horizon 0 is the initial measure itself
  const KernelSequence seq(
      mu, {KernelStep{FiniteKernel::identity(s), StepKind::markov}});
  const TrajectoryMeasure base = ionescu_tulcea(seq, 0);
  CHECK(base.support_size() == 2);
  CHECK(weight_of(base, {0}) == 0.5);

  // identity kernels keep the chain constant: two trajectories at any horizon
  std::vector<KernelStep> stays(
      2, KernelStep{FiniteKernel::identity(s), StepKind::markov});
  const KernelSequence constant(mu, stays);
  const TrajectoryMeasure t = ionescu_tulcea(constant, 2);
  CHECK(t.support_size() == 2);
  CHECK(weight_of(t, {0, 0, 0}) == 0.5);
  CHECK(weight_of(t, {1, 1, 1}) == 0.5);

  // fully deterministic chain: single trajectory of weight one
  const KernelSequence determined(
      ProbMeasure::point_mass(s, 0),
      {KernelStep{FiniteKernel::identity(s), StepKind::markov}});
  const TrajectoryMeasure single = ionescu_tulcea(determined, 1);
  CHECK(single.support_size() == 1);
  CHECK(single.weight_at(0) == 1.0);

  CHECK_THROWS_AS(ionescu_tulcea(constant, 3), std::invalid_argument);
}

TEST_CASE("enumeration cap refuses oversized expansions") {
  const KernelSequence chain = uniform_chain(4, 6);
  EnumerationOptions options;
  options.cap = 100;
  CHECK_THROWS_WITH_AS(ionescu_tulcea(chain, 6, options),
                       doctest::Contains("coupled_sampler"),
                       std::runtime_error);
}

TEST_CASE("prune_below records discarded mass") {
  const KernelSequence chain = uniform_chain(2, 3);
  EnumerationOptions options;
  options.prune_below = 0.2;  // every trajectory weight is 1/16
  const TrajectoryMeasure t = ionescu_tulcea(chain, 3, options);
  CHECK(t.support_size() == 0);
  CHECK(approx(t.pruned_mass(), 1.0, 1e-12));
  CHECK(approx(t.mass() + t.pruned_mass(), 1.0, 1e-12));
}

TEST_CASE("marginal projections") {
  const AtomSpace s = AtomSpace::range(2);

  // independent product: single-coordinate marginal recovers the factor
  const ProbMeasure mu(s, {0.3, 0.7});
  const ProbMeasure rho(s, {0.9, 0.1});
  const TrajectoryMeasure q =
      product_measure(mu, FiniteKernel::constant(s, rho));
  const std::size_t both[] = {0, 1};
  const TrajectoryMeasure same = marginal(q, both);
  CHECK(trajectory_tv(q, same) == 0.0);

  const std::size_t second[] = {1};
  const TrajectoryMeasure coord1 = marginal(q, second);
  CHECK(approx(coord1.weight_of(std::vector<std::uint32_t>{0}), 0.9, 1e-15));

  // symmetric two-state chain at the uniform start stays uniform
  const auto [nominal, perturbed] =
      build_chain(TwoStateSpec(0.5, 0.1, 0.0, 1));
  const TrajectoryMeasure path = ionescu_tulcea(perturbed, 1);
  const TrajectoryMeasure last = marginal(path, second);
  CHECK(approx(last.weight_of(std::vector<std::uint32_t>{0}), 0.5));
  CHECK(approx(last.weight_of(std::vector<std::uint32_t>{1}), 0.5));

  const std::size_t bad[] = {0, 5};
  CHECK_THROWS_AS(marginal(q, bad), std::invalid_argument);
  const std::size_t unsorted[] = {1, 0};
  CHECK_THROWS_AS(marginal(q, unsorted), std::invalid_argument);
}

TEST_CASE("trajectory TV distance") {
  const AtomSpace s = AtomSpace::range(2);
  const ProbMeasure mu(s, {0.5, 0.5});
  const TrajectoryMeasure diag =
      product_measure(mu, FiniteKernel::identity(s));
  CHECK(trajectory_tv(diag, diag) == 0.0);

  const FiniteKernel swapped =
      FiniteKernel::from_matrix(s, s, {{0.0, 1.0}, {1.0, 0.0}});
  const TrajectoryMeasure anti = product_measure(mu, swapped);
  CHECK(approx(trajectory_tv(diag, anti), 2.0, 1e-15));

  // closed form at (p, eps, delta, n) = (0.5, 0.1, 0, 2): 2 (1 - 0.9^2)
  const auto [nominal, perturbed] =
      build_chain(TwoStateSpec(0.5, 0.1, 0.0, 2));
  const double tv = trajectory_tv(ionescu_tulcea(nominal, 2),
                                  ionescu_tulcea(perturbed, 2));
  CHECK(approx(tv, 0.38));

  const TrajectoryMeasure shallow = ionescu_tulcea(nominal, 1);
  const TrajectoryMeasure deep = ionescu_tulcea(nominal, 2);
  CHECK_THROWS_AS(trajectory_tv(shallow, deep), std::invalid_argument);
}

TEST_CASE("iterated product matches brute-force enumeration") {
  testgen::Gen gen(722);
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint32_t states = gen.uniform_u32(2, 4);
    const std::size_t horizon = gen.uniform_u32(0, 4);
    const auto [seq, seq_alt] = gen.sequence_pair(states, horizon);
    const TrajectoryMeasure t = ionescu_tulcea(seq, horizon);

    const auto initial = seq.initial().weights();
    const brute::Dist expected = brute::enumerate_chain(
        std::vector<double>(initial.begin(), initial.end()), horizon,
        [&](std::size_t k, const brute::Tuple& prefix) {
          const auto w = seq.step(k).kernel.row(prefix.back()).weights();
          return std::vector<double>(w.begin(), w.end());
        });

    const brute::Dist got = to_dist(t);
    REQUIRE(got.size() == expected.size());
    for (const auto& [tuple, w] : expected) {
      const auto it = got.find(tuple);
      REQUIRE(it != got.end());
      CHECK(approx(it->second, w, 1e-15));
    }
    CHECK(approx(t.mass(), 1.0, 1e-9));
  }
}

TEST_CASE("marginals of longer products agree with shorter products") {
  testgen::Gen gen(733);
  for (int rep = 0; rep < 60; ++rep) {
    const std::uint32_t states = gen.uniform_u32(2, 3);
    const std::size_t n = gen.uniform_u32(1, 4);
    const auto [seq, ignored] = gen.sequence_pair(states, n);
    const TrajectoryMeasure full = ionescu_tulcea(seq, n);
    for (std::size_t m = 0; m < n; ++m) {
      std::vector<std::size_t> coords(m + 1);
      for (std::size_t i = 0; i <= m; ++i) coords[i] = i;
      const TrajectoryMeasure projected = marginal(full, coords);
      const TrajectoryMeasure direct = ionescu_tulcea(seq, m);
      CHECK(trajectory_max_abs_diff(projected, direct) <= 1e-12);
    }
  }
}

TEST_CASE("trajectory TV is invariant under consistent atom reordering") {
  testgen::Gen gen(744);
  for (int rep = 0; rep < 40; ++rep) {
    const std::uint32_t states = gen.uniform_u32(2, 4);
    const std::size_t n = 2;
    const auto [seq, seq_alt] = gen.sequence_pair(states, n, 0.3);
    const TrajectoryMeasure a = ionescu_tulcea(seq, n);
    const TrajectoryMeasure b = ionescu_tulcea(seq_alt, n);

    // reverse the atom order of every component space
    std::vector<AtomSpace> reversed_spaces;
    for (const auto& space : a.component_spaces()) {
      std::vector<std::string> labels(space.labels().begin(),
                                      space.labels().end());
      std::reverse(labels.begin(), labels.end());
      reversed_spaces.emplace_back(std::move(labels));
    }
    auto remap = [&](const TrajectoryMeasure& t) {
      std::map<TrajectoryMeasure::Tuple, double> m;
      for (std::size_t i = 0; i < t.support_size(); ++i) {
        const auto tup = t.tuple(i);
        TrajectoryMeasure::Tuple key(tup.begin(), tup.end());
        for (std::size_t k = 0; k < key.size(); ++k) {
          key[k] = static_cast<std::uint32_t>(states - 1) - key[k];
        }
        m[key] = t.weight_at(i);
      }
      return TrajectoryMeasure::from_map(reversed_spaces, m);
    };
    CHECK(approx(trajectory_tv(remap(a), remap(b)), trajectory_tv(a, b), 1e-14));
  }
}

TEST_CASE("flattening onto the product space preserves weights") {
  const AtomSpace s = AtomSpace::range(2);
  const ProbMeasure mu(s, {0.5, 0.5});
  const TrajectoryMeasure diag =
      product_measure(mu, FiniteKernel::identity(s));
  const ProbMeasure flat = diag.to_prob_measure();
  REQUIRE(flat.size() == 4);
  CHECK(flat.weight(0) == 0.5);  // (0,0)
  CHECK(flat.weight(3) == 0.5);  // (1,1)
  CHECK(flat.weight(1) == 0.0);
  CHECK(flat.space().label(3) == "(1,1)");

  CHECK_THROWS_AS(diag.to_prob_measure(3), std::runtime_error);
}

TEST_CASE("full-history steps index rows by the flattened prefix") {
  const AtomSpace s = AtomSpace::range(2);
  const AtomSpace histories = product_space(s, s);
  // deterministic second step: go to state (x0 XOR x1)
  std::vector<ProbMeasure> rows;
  for (std::uint32_t h = 0; h < 4; ++h) {
    const std::uint32_t x0 = h / 2;
    const std::uint32_t x1 = h % 2;
    rows.push_back(ProbMeasure::point_mass(s, x0 ^ x1));
  }
  const KernelSequence seq(
      ProbMeasure::uniform(s),
      {KernelStep{FiniteKernel::constant(s, ProbMeasure::uniform(s)),
                  StepKind::markov},
       KernelStep{FiniteKernel(histories, s, rows), StepKind::full_history}});

  const TrajectoryMeasure t = ionescu_tulcea(seq, 2);
  CHECK(t.support_size() == 4);
  CHECK(weight_of(t, {0, 0, 0}) == 0.25);
  CHECK(weight_of(t, {0, 1, 1}) == 0.25);
  CHECK(weight_of(t, {1, 0, 1}) == 0.25);
  CHECK(weight_of(t, {1, 1, 0}) == 0.25);

  // the expanded view of a markov step replays the same rows
  const FiniteKernel expanded = seq.history_expanded_step(2, histories);
  CHECK(expanded.row(2).weight(1) == 1.0);  // history (1,0)
}

TEST_CASE("trajectory measure construction validates its arena") {
  const std::vector<AtomSpace> spaces{AtomSpace::range(2),
                                      AtomSpace::range(2)};
  CHECK_THROWS_AS(
      TrajectoryMeasure(spaces, {0, 0, 0, 1}, {0.5, -0.5}),
      std::invalid_argument);
  CHECK_THROWS_AS(TrajectoryMeasure(spaces, {0, 1, 0, 0}, {0.5, 0.5}),
                  std::invalid_argument);  // unsorted
  CHECK_THROWS_AS(TrajectoryMeasure(spaces, {0, 0, 0, 5}, {0.5, 0.5}),
                  std::invalid_argument);  // out of range
  CHECK_THROWS_AS(TrajectoryMeasure(spaces, {0, 0}, {0.9}),
                  std::invalid_argument);  // mass off

  // from_map drops exact zeros
  std::map<TrajectoryMeasure::Tuple, double> m;
  m[{0, 0}] = 1.0;
  m[{1, 1}] = 0.0;
  const TrajectoryMeasure t = TrajectoryMeasure::from_map(spaces, m);
  CHECK(t.support_size() == 1);
  CHECK(t.tuple_label(0) == "(0,0)");
}
