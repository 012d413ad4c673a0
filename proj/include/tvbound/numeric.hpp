#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

namespace tvbound {

// Compensated (Neumaier) summation. Long sums of trajectory weights have to
// stay well below the 1e-12 identity tolerances, which plain left-to-right
// accumulation does not guarantee at 1e4+ terms.
class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sum_abs(std::span<const double> values) {
  NeumaierSum s;
  for (double v : values) s.add(std::abs(v));
  return s.value();
}

inline double sum(std::span<const double> values) {
  NeumaierSum s;
  for (double v : values) s.add(v);
  return s.value();
}

// Locale-independent float formatting with 17 significant digits (enough to
// round-trip any double). Matches printf "%.17g" output.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace tvbound
