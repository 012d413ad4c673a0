#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tvbound {

// Construction-time clamp: weight magnitudes below this are snapped to exactly
// zero, so sign splits and support tests are not polluted by float dust.
inline constexpr double kWeightDustTol = 1e-12;
// Admission tolerance for the total mass of a probability measure.
inline constexpr double kMassTol = 1e-9;
// Tolerance for exact identities (meet/TV duality, coupling certificates).
inline constexpr double kExactTol = 1e-12;

/// Ordered finite set of distinct atom labels.
///
/// Immutable and cheaply copyable (shared payload). The label order is the
/// canonical iteration order used everywhere, so equal spaces enumerate
/// identically and serialized output is deterministic.
class AtomSpace {
 public:
  explicit AtomSpace(std::vector<std::string> labels);

  /// Space with labels "0", "1", ..., "count-1".
  static AtomSpace range(std::size_t count);

  std::size_t size() const { return data_->labels.size(); }
  const std::string& label(std::uint32_t index) const;
  std::span<const std::string> labels() const { return data_->labels; }
  std::optional<std::uint32_t> index_of(std::string_view label) const;

  bool same_as(const AtomSpace& other) const;

 private:
  struct Data {
    std::vector<std::string> labels;
    std::unordered_map<std::string_view, std::uint32_t> index;
  };
  std::shared_ptr<const Data> data_;
};

/// Product of atom spaces, atoms enumerated in row-major order (first factor
/// slowest). Labels are "(a,b,...)" compositions of the factor labels.
AtomSpace product_space(std::span<const AtomSpace> factors);
AtomSpace product_space(const AtomSpace& a, const AtomSpace& b);

/// Finite-support signed measure: one real weight per atom of its space.
/// Immutable after construction; magnitudes below kWeightDustTol are clamped
/// to exactly zero at construction.
class SignedMeasure {
 public:
  SignedMeasure(AtomSpace space, std::vector<double> weights);

  static SignedMeasure zero(AtomSpace space);

  const AtomSpace& space() const { return space_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::uint32_t atom) const { return weights_.at(atom); }
  std::size_t size() const { return weights_.size(); }

  /// Signed total (not the total variation).
  double mass() const;

 private:
  AtomSpace space_;
  std::vector<double> weights_;
};

SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure operator*(double scale, const SignedMeasure& m);

/// Probability measure: nonnegative weights summing to 1 within kMassTol.
/// Out-of-tolerance masses are rejected, never silently renormalized; use
/// ProbMeasure::normalized when rescaling is intended.
class ProbMeasure {
 public:
  ProbMeasure(AtomSpace space, std::vector<double> weights);

  /// Rescales nonnegative weights to total mass one, then constructs.
  static ProbMeasure normalized(AtomSpace space, std::vector<double> weights);
  static ProbMeasure point_mass(AtomSpace space, std::uint32_t atom);
  static ProbMeasure uniform(AtomSpace space);

  const AtomSpace& space() const { return measure_.space(); }
  std::span<const double> weights() const { return measure_.weights(); }
  double weight(std::uint32_t atom) const { return measure_.weight(atom); }
  std::size_t size() const { return measure_.size(); }
  double mass() const { return measure_.mass(); }

  const SignedMeasure& as_signed() const { return measure_; }

 private:
  SignedMeasure measure_;
};

SignedMeasure operator-(const ProbMeasure& a, const ProbMeasure& b);

/// Partition of an atom space into disjoint nonempty blocks covering it.
/// Models the sigma-algebra generated by the blocks (all unions of blocks).
class Partition {
 public:
  Partition(AtomSpace space, std::vector<std::vector<std::uint32_t>> blocks);

  static Partition trivial(AtomSpace space);     // one block, whole space
  static Partition singletons(AtomSpace space);  // one block per atom

  const AtomSpace& space() const { return space_; }
  std::span<const std::vector<std::uint32_t>> blocks() const { return blocks_; }

 private:
  AtomSpace space_;
  std::vector<std::vector<std::uint32_t>> blocks_;
};

struct HahnJordan {
  SignedMeasure positive;
  SignedMeasure negative;
};

/// Splits a signed measure into mutually singular nonnegative parts with
/// positive - negative == input atomwise.
HahnJordan hahn_jordan(const SignedMeasure& m);

/// Total variation norm: sum of absolute weights.
double tv_norm(const SignedMeasure& m);
double tv_norm(const ProbMeasure& a, const ProbMeasure& b);

/// Atomwise minimum of two measures on the same space (lattice meet).
SignedMeasure meet(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure meet(const ProbMeasure& a, const ProbMeasure& b);

/// Mass of the meet of two probability measures (their overlap).
double meet_mass(const ProbMeasure& a, const ProbMeasure& b);

struct MeetTvIdentity {
  double lhs;  // mass of the meet
  double rhs;  // 1 - tv/2
};

/// Both sides of the overlap identity  ||a ^ b|| = 1 - ||a - b|| / 2,
/// computed by independent routes (atomwise minima vs. atomwise absolute
/// differences).
MeetTvIdentity meet_tv_identity_check(const ProbMeasure& a,
                                      const ProbMeasure& b);

/// Pushforward of a measure along an atom map into `target`.
SignedMeasure image_measure(const SignedMeasure& m,
                            const std::function<std::uint32_t(std::uint32_t)>& map,
                            const AtomSpace& target);

/// Total variation distance seen through the sigma-algebra generated by the
/// partition: sum over blocks of |a(B) - b(B)|. Never exceeds the full TV
/// distance, and equals it for the singleton partition.
double tv_distance_on_partition(const ProbMeasure& a, const ProbMeasure& b,
                                const Partition& partition);

}  // namespace tvbound
