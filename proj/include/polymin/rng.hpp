#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace polymin {

/// Deterministic random stream. Standard-library distributions are
/// implementation-defined, so all sampling primitives live here; results are
/// bit-identical across platforms and independent of thread scheduling as
/// long as each worker owns its own stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby seeds diverge immediately.
    next_u64();
    next_u64();
  }

  // splitmix64 step
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  /// Standard normal via Box-Muller (pairs cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Categorical sample by CDF inversion; `probs` sums to ~1.
  int sample_cdf(const Eigen::VectorXd& probs) {
    const double u = uniform();
    double acc = 0.0;
    const int m = static_cast<int>(probs.size());
    for (int i = 0; i < m; ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return m - 1;
  }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/// Seed derivation for named child streams: hash the master seed together
/// with a stream label and index (FNV-1a over the label, then splitmix-style
/// mixing). Documented so runs are citable: child = derive_stream(seed, name, i).
inline std::uint64_t derive_stream(std::uint64_t master, std::string_view name,
                                   std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ (h + 0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng child_rng(std::uint64_t master, std::string_view name,
                     std::uint64_t index) {
  return Rng(derive_stream(master, name, index));
}

}  // namespace polymin
