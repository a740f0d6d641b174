#pragma once

#include <cstdint>
#include <vector>

#include "certipomdp/model.hpp"

namespace certipomdp {

/// Deterministic splitmix64 stream. Self-contained so runs reproduce
/// byte-for-byte across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Integer in [0, n).
  int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  /// Samples an index from unnormalized non-negative weights (CDF walk,
  /// last positive entry absorbs rounding residue).
  int categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    double u = uniform() * total;
    int last = -1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      last = static_cast<int>(i);
      u -= w[i];
      if (u < 0.0) return last;
    }
    return last;
  }

  /// Derives an independent stream (e.g. per episode or per purpose).
  Rng fork(std::uint64_t salt) const { return Rng(splitmix64(state_ ^ splitmix64(salt))); }

 private:
  std::uint64_t state_;
};

/// Samples x' ~ T(.|x,a) from the model tables.
inline StateId sample_next_state(const TabularPomdp& m, Rng& rng, StateId x, ActionId a) {
  double u = rng.uniform();
  StateId last = 0;
  for (StateId xp = 0; xp < m.num_states; ++xp) {
    double p = m.trans(x, a, xp);
    if (p <= 0.0) continue;
    last = xp;
    u -= p;
    if (u < 0.0) return xp;
  }
  return last;
}

/// Samples z ~ O(.|x).
inline ObsId sample_obs(const TabularPomdp& m, Rng& rng, StateId x) {
  double u = rng.uniform();
  ObsId last = 0;
  for (ObsId z = 0; z < m.num_obs; ++z) {
    double p = m.obs(x, z);
    if (p <= 0.0) continue;
    last = z;
    u -= p;
    if (u < 0.0) return z;
  }
  return last;
}

/// Samples a state from a sparse belief.
inline StateId sample_belief(const Belief& b, Rng& rng) {
  double u = rng.uniform();
  StateId last = b.probs.begin()->first;
  for (const auto& [x, p] : b.probs) {
    last = x;
    u -= p;
    if (u < 0.0) return x;
  }
  return last;
}

}  // namespace certipomdp
