#ifndef SGBS_COMMON_HPP
#define SGBS_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sgbs {

/// Discrete decision variable assignment. Meaning is problem-specific:
/// a node index for routing problems, a job index or the no-op token for
/// scheduling.
using Action = std::int32_t;

/// Reward sentinel for infeasible solutions. The most-negative finite
/// double keeps rewards totally ordered and comparable with operator<.
inline constexpr double kInfeasibleReward = std::numeric_limits<double>::lowest();

inline bool is_feasible_reward(double r) { return r != kInfeasibleReward; }

/// SplitMix64 step, used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds extra words into a seed so that (seed, index, tag) streams are
/// independent. Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(base ^ 0x5851f42d4c957f2dULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return s;
}

/**
 * @brief Deterministic random source with portable derived values.
 *
 * std::mt19937_64 output is specified bit-exactly by the standard; the
 * double/int helpers below avoid std::*_distribution, whose results vary
 * across standard libraries. Identical seeds therefore give identical
 * streams on every platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::next_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

  /// Standard normal via Box-Muller on the portable uniform stream.
  double next_normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

/// Worker count for parallel maps. Controlled by SGBS_WORKERS only;
/// defaults to 1 (serial). Results are index-addressed, so any worker
/// count produces identical output.
inline int worker_count() {
  if (const char* env = std::getenv("SGBS_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Runs fn(i) for i in [0, count). With workers > 1 the index range is
/// split across threads; fn must write only to index-owned slots.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t n_threads = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  std::size_t chunk = count / n_threads;
  std::size_t extra = count % n_threads;
  std::size_t begin = 0;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t len = chunk + (t < extra ? 1 : 0);
    const std::size_t end = begin + len;
    pool.emplace_back([begin, end, &fn]() {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
    begin = end;
  }
  for (auto& th : pool) th.join();
}

/// Formats a double with 17 significant digits; round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace sgbs

#endif  // SGBS_COMMON_HPP
