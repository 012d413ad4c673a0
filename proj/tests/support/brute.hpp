#pragma once

// Brute-force oracles on plain vectors and maps. These recompute expected
// values by direct enumeration, independent of the library's measure
// arithmetic, so tests compare two genuinely different routes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace brute {

using Tuple = std::vector<std::uint32_t>;
using Dist = std::map<Tuple, double>;

inline double tv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline double meet_mass(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

// Enumerates the chain distribution over trajectories (x_0, ..., x_n).
// `row(k, prefix)` returns the transition weights of step k given the full
// prefix (x_0, ..., x_{k-1}).
inline Dist enumerate_chain(
    const std::vector<double>& initial, std::size_t horizon,
    const std::function<std::vector<double>(std::size_t, const Tuple&)>& row) {
  Dist current;
  for (std::uint32_t x = 0; x < initial.size(); ++x) {
    if (initial[x] != 0.0) current[{x}] = initial[x];
  }
  for (std::size_t k = 1; k <= horizon; ++k) {
    Dist next;
    for (const auto& [prefix, w] : current) {
      const std::vector<double> r = row(k, prefix);
      for (std::uint32_t y = 0; y < r.size(); ++y) {
        if (r[y] == 0.0) continue;
        Tuple t = prefix;
        t.push_back(y);
        next[t] = w * r[y];
      }
    }
    current = std::move(next);
  }
  return current;
}

inline double tv(const Dist& a, const Dist& b) {
  double s = 0.0;
  for (const auto& [t, w] : a) {
    const auto it = b.find(t);
    s += std::abs(w - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [t, w] : b) {
    if (!a.contains(t)) s += std::abs(w);
  }
  return s;
}

inline double meet_mass(const Dist& a, const Dist& b) {
  double s = 0.0;
  for (const auto& [t, w] : a) {
    const auto it = b.find(t);
    if (it != b.end()) s += std::min(w, it->second);
  }
  return s;
}

inline Dist marginal(const Dist& d, const std::vector<std::size_t>& coords) {
  Dist out;
  for (const auto& [t, w] : d) {
    Tuple key;
    key.reserve(coords.size());
    for (std::size_t c : coords) key.push_back(t[c]);
    out[key] += w;
  }
  return out;
}

}  // namespace brute
