#ifndef SGBS_GENERATOR_HPP
#define SGBS_GENERATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sgbs/common.hpp"
#include "sgbs/cvrp.hpp"
#include "sgbs/ffsp.hpp"
#include "sgbs/tsp.hpp"

namespace sgbs {

/// Benchmark-convention default: 30 up to n=20, 40 up to n=50, 50 beyond.
inline int default_cvrp_capacity(int n) {
  if (n <= 20) return 30;
  if (n <= 50) return 40;
  return 50;
}

struct TspGenConfig {
  int n = 20;
};

struct CvrpGenConfig {
  int n = 20;
  int demand_min = 1;
  int demand_max = 9;
  int capacity = 0;  // 0 -> default_cvrp_capacity(n)
};

struct FfspGenConfig {
  int jobs = 6;
  std::vector<int> machines_per_stage = {4, 4, 4};
  int time_min = 2;
  int time_max = 9;
};

using InstanceVariant = std::variant<TspInstance, CvrpInstance, FfspInstance>;

/// (seed, index) fully determine the output, bit for bit.
inline TspInstance generate_tsp(const TspGenConfig& cfg, std::uint64_t seed, std::int64_t index) {
  if (cfg.n < 3) throw std::invalid_argument("generate_tsp: n must be >= 3");
  if (index < 0) throw std::invalid_argument("generate_tsp: index must be >= 0");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index), 0x7359));
  std::vector<Vec2> pts(cfg.n);
  for (Vec2& p : pts) {
    p.x = rng.next_double();
    p.y = rng.next_double();
  }
  return TspInstance(std::move(pts));
}

inline CvrpInstance generate_cvrp(const CvrpGenConfig& cfg, std::uint64_t seed, std::int64_t index) {
  if (cfg.n < 1) throw std::invalid_argument("generate_cvrp: n must be >= 1");
  if (index < 0) throw std::invalid_argument("generate_cvrp: index must be >= 0");
  if (cfg.demand_min < 1 || cfg.demand_max < cfg.demand_min)
    throw std::invalid_argument("generate_cvrp: bad demand range");
  const int cap = cfg.capacity > 0 ? cfg.capacity : default_cvrp_capacity(cfg.n);
  if (cfg.demand_max > cap) throw std::invalid_argument("generate_cvrp: demand_max exceeds capacity");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index), 0xc49f));
  Vec2 depot{rng.next_double(), rng.next_double()};
  std::vector<Vec2> pts(cfg.n);
  for (Vec2& p : pts) {
    p.x = rng.next_double();
    p.y = rng.next_double();
  }
  std::vector<int> dem(cfg.n);
  for (int& d : dem) d = static_cast<int>(rng.next_int(cfg.demand_min, cfg.demand_max));
  return CvrpInstance(depot, std::move(pts), std::move(dem), cap);
}

inline FfspInstance generate_ffsp(const FfspGenConfig& cfg, std::uint64_t seed, std::int64_t index) {
  if (cfg.jobs < 1) throw std::invalid_argument("generate_ffsp: jobs must be >= 1");
  if (index < 0) throw std::invalid_argument("generate_ffsp: index must be >= 0");
  if (cfg.machines_per_stage.empty()) throw std::invalid_argument("generate_ffsp: need stages");
  if (cfg.time_min < 1 || cfg.time_max < cfg.time_min)
    throw std::invalid_argument("generate_ffsp: bad time range");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index), 0xff59));
  std::vector<FfspStage> stages;
  stages.reserve(cfg.machines_per_stage.size());
  for (int machines : cfg.machines_per_stage) {
    if (machines < 1) throw std::invalid_argument("generate_ffsp: stage needs machines");
    FfspStage st;
    st.proc.resize(machines);
    for (auto& row : st.proc) {
      row.resize(cfg.jobs);
      for (int& p : row) p = static_cast<int>(rng.next_int(cfg.time_min, cfg.time_max));
    }
    stages.push_back(std::move(st));
  }
  return FfspInstance(cfg.jobs, std::move(stages));
}

/// Runtime-dispatched generator used by the CLI layer.
struct InstanceGenerator {
  std::variant<TspGenConfig, CvrpGenConfig, FfspGenConfig> config;
  std::uint64_t seed = 0;

  InstanceVariant generate(std::int64_t index) const {
    if (std::holds_alternative<TspGenConfig>(config))
      return generate_tsp(std::get<TspGenConfig>(config), seed, index);
    if (std::holds_alternative<CvrpGenConfig>(config))
      return generate_cvrp(std::get<CvrpGenConfig>(config), seed, index);
    return generate_ffsp(std::get<FfspGenConfig>(config), seed, index);
  }
};

}  // namespace sgbs

#endif  // SGBS_GENERATOR_HPP
