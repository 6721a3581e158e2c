#ifndef SGBS_HARNESS_HPP
#define SGBS_HARNESS_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgbs/augment.hpp"
#include "sgbs/checkpoint.hpp"
#include "sgbs/generator.hpp"
#include "sgbs/instance_io.hpp"
#include "sgbs/methods.hpp"
#include "sgbs/oracle.hpp"
#include "sgbs/pretrain.hpp"

namespace sgbs {

using Json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { kTsp, kCvrp, kFfsp };

inline ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "tsp" || s == "TSP") return ProblemKind::kTsp;
  if (s == "cvrp" || s == "CVRP") return ProblemKind::kCvrp;
  if (s == "ffsp" || s == "FFSP") return ProblemKind::kFfsp;
  throw ConfigError("unknown problem kind: " + s);
}

inline const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::kTsp: return "tsp";
    case ProblemKind::kCvrp: return "cvrp";
    case ProblemKind::kFfsp: return "ffsp";
  }
  return "?";
}

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kTsp;
  TspGenConfig tsp;
  CvrpGenConfig cvrp;
  FfspGenConfig ffsp;
};

struct LabeledMethod {
  std::string label;
  MethodSpec spec;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::string instances_file;      // empty: generate
  std::uint64_t instances_seed = 1;
  int count = 10;
  std::string checkpoint;          // empty: default policy
  std::vector<LabeledMethod> methods;
  std::int64_t budget = 1200;
  bool augment = false;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::string reference = "auto";  // auto | oracle | run-best
  bool cache_oracle = false;
  Json raw;                        // full parsed config, echoed into reports
};

namespace detail {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

inline ProblemSpec parse_problem_spec(const Json& j) {
  if (!j.contains("problem")) throw ConfigError("missing 'problem' section");
  const Json& p = j.at("problem");
  ProblemSpec spec;
  spec.kind = parse_problem_kind(detail::get_or<std::string>(p, "kind", ""));
  switch (spec.kind) {
    case ProblemKind::kTsp:
      spec.tsp.n = detail::get_or<int>(p, "n", 20);
      if (spec.tsp.n < 3) throw ConfigError("tsp n must be >= 3");
      break;
    case ProblemKind::kCvrp:
      spec.cvrp.n = detail::get_or<int>(p, "n", 20);
      spec.cvrp.capacity = detail::get_or<int>(p, "capacity", 0);
      spec.cvrp.demand_min = detail::get_or<int>(p, "demand_min", 1);
      spec.cvrp.demand_max = detail::get_or<int>(p, "demand_max", 9);
      if (spec.cvrp.n < 1) throw ConfigError("cvrp n must be >= 1");
      break;
    case ProblemKind::kFfsp:
      spec.ffsp.jobs = detail::get_or<int>(p, "jobs", 6);
      spec.ffsp.machines_per_stage =
          detail::get_or<std::vector<int>>(p, "machines_per_stage", {4, 4, 4});
      spec.ffsp.time_min = detail::get_or<int>(p, "time_min", 2);
      spec.ffsp.time_max = detail::get_or<int>(p, "time_max", 9);
      if (spec.ffsp.jobs < 1) throw ConfigError("ffsp jobs must be >= 1");
      break;
  }
  return spec;
}

inline MethodSpec parse_method_spec(const Json& j) {
  MethodSpec spec;
  const std::string name = detail::get_or<std::string>(j, "name", "");
  if (!parse_method(name, spec.method)) throw ConfigError("unknown method: '" + name + "'");
  spec.sgbs_config.beam_width = detail::get_or<int>(j, "beta", 4);
  spec.sgbs_config.expansion_factor = detail::get_or<int>(j, "gamma", 4);
  spec.sgbs_config.track_incumbent = detail::get_or<bool>(j, "track_incumbent", true);
  spec.beam_width = detail::get_or<int>(j, "width", 0);
  spec.mcts_config.c_puct = detail::get_or<double>(j, "c_puct", 1.0);
  spec.mcts_config.simulations_per_depth = detail::get_or<int>(j, "simulations", 12);
  spec.mcts_config.denominator_offset = detail::get_or<double>(j, "offset", 0.1);
  spec.eas_config.alpha = detail::get_or<double>(j, "alpha", 0.1);
  spec.eas_config.imitation_weight = detail::get_or<double>(j, "lambda", 1.0);
  spec.eas_config.samples_per_iter = detail::get_or<int>(j, "samples", 32);
  spec.eas_config.entropy_coeff = detail::get_or<double>(j, "entropy_coeff", 0.0);
  spec.eas_config.max_iterations =
      detail::get_or<int>(j, "max_iterations", std::numeric_limits<int>::max());
  spec.eas_config.timeout_seconds = detail::get_or<double>(
      j, "timeout_seconds", std::numeric_limits<double>::infinity());
  spec.eas_config.eas_steps_per_sgbs = detail::get_or<int>(j, "eas_steps_per_sgbs", 1);
  spec.eas_config.adapter_hidden = detail::get_or<int>(j, "hidden", kDefaultAdapterHidden);
  return spec;
}

inline ExperimentConfig parse_experiment_config(const Json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.problem = parse_problem_spec(j);
  if (j.contains("instances")) {
    const Json& inst = j.at("instances");
    cfg.instances_file = detail::get_or<std::string>(inst, "file", "");
    cfg.instances_seed = detail::get_or<std::uint64_t>(inst, "seed", 1);
    cfg.count = detail::get_or<int>(inst, "count", 10);
  }
  if (cfg.instances_file.empty() && cfg.count < 1)
    throw ConfigError("instances count must be >= 1");
  if (j.contains("policy"))
    cfg.checkpoint = detail::get_or<std::string>(j.at("policy"), "checkpoint", "");
  if (j.contains("methods")) {
    for (const Json& m : j.at("methods")) {
      LabeledMethod lm;
      lm.spec = parse_method_spec(m);
      lm.label = detail::get_or<std::string>(m, "label", method_name(lm.spec.method));
      cfg.methods.push_back(std::move(lm));
    }
  }
  cfg.budget = detail::get_or<std::int64_t>(j, "budget", 1200);
  if (cfg.budget <= 0) throw ConfigError("budget must be > 0");
  cfg.augment = detail::get_or<bool>(j, "augment", false);
  cfg.out_dir = detail::get_or<std::string>(j, "out", "out");
  cfg.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
  cfg.reference = detail::get_or<std::string>(j, "reference", "auto");
  if (cfg.reference != "auto" && cfg.reference != "oracle" && cfg.reference != "run-best")
    throw ConfigError("reference must be auto, oracle, or run-best");
  cfg.cache_oracle = detail::get_or<bool>(j, "oracle", false);
  if (cfg.augment && cfg.problem.kind == ProblemKind::kFfsp)
    throw ConfigError("x8 augmentation is not defined for ffsp");
  return cfg;
}

namespace detail {

template <typename P>
const auto& gen_config_for(const ProblemSpec& spec) {
  if constexpr (std::is_same_v<P, TspProblem>) return spec.tsp;
  else if constexpr (std::is_same_v<P, CvrpProblem>) return spec.cvrp;
  else return spec.ffsp;
}

template <typename P>
typename P::Instance generate_for(const ProblemSpec& spec, std::uint64_t seed, std::int64_t i) {
  if constexpr (std::is_same_v<P, TspProblem>) return generate_tsp(spec.tsp, seed, i);
  else if constexpr (std::is_same_v<P, CvrpProblem>) return generate_cvrp(spec.cvrp, seed, i);
  else return generate_ffsp(spec.ffsp, seed, i);
}

template <typename P>
std::vector<typename P::Instance> load_instances(const ExperimentConfig& cfg) {
  std::vector<typename P::Instance> out;
  if (!cfg.instances_file.empty()) {
    for (auto& v : parse_batch_file(cfg.instances_file)) {
      if (!std::holds_alternative<typename P::Instance>(v))
        throw ConfigError("instance file problem kind does not match the config");
      out.push_back(std::get<typename P::Instance>(std::move(v)));
    }
    if (out.empty()) throw ConfigError("instance file is empty: " + cfg.instances_file);
  } else {
    out.reserve(cfg.count);
    for (int i = 0; i < cfg.count; ++i)
      out.push_back(generate_for<P>(cfg.problem, cfg.instances_seed, i));
  }
  return out;
}

template <typename P>
PolicyParams load_policy(const ExperimentConfig& cfg) {
  if (cfg.checkpoint.empty()) return default_policy(P::kFeatureCount);
  if (!std::filesystem::exists(cfg.checkpoint))
    throw ConfigError("checkpoint does not exist: " + cfg.checkpoint);
  const Checkpoint ck = load_checkpoint_file(cfg.checkpoint);
  if (static_cast<int>(ck.params.theta.size()) != P::kFeatureCount)
    throw ConfigError("checkpoint feature count does not match the problem");
  return ck.params;
}

inline bool oracle_available(const TspInstance& i) { return i.size() <= 13; }
inline bool oracle_available(const CvrpInstance& i) { return i.num_customers() <= 8; }
inline bool oracle_available(const FfspInstance& i) {
  if (i.num_jobs > 5 || i.num_stages() > 2) return false;
  for (int k = 0; k < i.num_stages(); ++k)
    if (i.machines_at(k) > 2) return false;
  return true;
}

inline void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + path);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

template <typename P>
int cmd_generate_impl(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.out_dir);
  std::vector<typename P::Instance> instances;
  instances.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i)
    instances.push_back(detail::generate_for<P>(cfg.problem, cfg.instances_seed, i));

  std::ostringstream batch;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (i > 0) batch << "\n";
    serialize_instance(batch, instances[i]);
  }
  const std::string file = cfg.out_dir + "/instances.txt";
  detail::write_text_file(file, batch.str());

  Json manifest;
  manifest["problem"] = cfg.raw.at("problem");
  manifest["seed"] = cfg.instances_seed;
  manifest["count"] = cfg.count;
  manifest["file"] = "instances.txt";
  if (cfg.cache_oracle) {
    Json costs = Json::array();
    for (const auto& inst : instances) {
      if (!detail::oracle_available(inst))
        throw ConfigError("oracle requested but instance size exceeds the oracle cap");
      costs.push_back(-brute_force_optimum(inst).reward);
    }
    manifest["oracle_costs"] = std::move(costs);
  }
  detail::write_json_file(cfg.out_dir + "/manifest.json", manifest);
  std::cout << "generated " << cfg.count << " " << problem_kind_name(cfg.problem.kind)
            << " instances -> " << file << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOutcome {
  int exit_code = 0;
  Json report;
};

template <typename P>
CompareOutcome cmd_compare_impl(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw ConfigError("compare needs a non-empty 'methods' list");
  if (cfg.augment) throw ConfigError("compare runs unaugmented; use solve for x8 composition");
  const std::vector<typename P::Instance> instances = detail::load_instances<P>(cfg);
  const PolicyParams params = detail::load_policy<P>(cfg);
  const std::size_t n_inst = instances.size();
  const std::size_t n_meth = cfg.methods.size();

  std::vector<std::vector<MethodRun>> runs(n_meth, std::vector<MethodRun>(n_inst));
  parallel_for(n_inst, worker_count(), [&](std::size_t i) {
    for (std::size_t m = 0; m < n_meth; ++m) {
      runs[m][i] = run_with_budget<P>(cfg.methods[m].spec, params, instances[i], cfg.budget,
                                      derive_seed(cfg.seed, i, 1000 + m));
    }
  });

  // Reference costs: exact optima at desk scale, run-best otherwise.
  bool use_oracle = cfg.reference == "oracle";
  if (cfg.reference == "auto") {
    use_oracle = true;
    for (const auto& inst : instances) use_oracle = use_oracle && detail::oracle_available(inst);
  }
  std::vector<double> reference(n_inst);
  if (use_oracle) {
    parallel_for(n_inst, worker_count(),
                 [&](std::size_t i) { reference[i] = -brute_force_optimum(instances[i]).reward; });
  } else {
    for (std::size_t i = 0; i < n_inst; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < n_meth; ++m)
        if (!runs[m][i].diverged && is_feasible_reward(runs[m][i].solution.reward))
          best = std::min(best, -runs[m][i].solution.reward);
      reference[i] = best;
    }
  }

  detail::ensure_dir(cfg.out_dir);
  detail::ensure_dir(cfg.out_dir + "/traces");

  Json report;
  report["problem"] = cfg.raw.at("problem");
  report["budget"] = cfg.budget;
  report["seed"] = cfg.seed;
  report["count"] = static_cast<int>(n_inst);
  report["reference"] = use_oracle ? "oracle" : "run-best";
  {
    Json refs = Json::array();
    for (double r : reference) refs.push_back(r);
    report["references"] = std::move(refs);
  }

  bool any_divergence = false;
  Json methods_json = Json::array();
  Json timings = Json::array();
  for (std::size_t m = 0; m < n_meth; ++m) {
    const std::string& label = cfg.methods[m].label;
    double cost_sum = 0.0, gap_sum = 0.0, wall_sum = 0.0;
    int valid = 0;
    Json rows = Json::array();
    for (std::size_t i = 0; i < n_inst; ++i) {
      const MethodRun& run = runs[m][i];
      Json row;
      row["cost"] = is_feasible_reward(run.solution.reward) ? -run.solution.reward
                                                            : std::numeric_limits<double>::quiet_NaN();
      row["consumed"] = run.consumed;
      row["truncated"] = run.truncated;
      row["diverged"] = run.diverged;
      row["solution"] = run.solution.actions;
      rows.push_back(std::move(row));
      wall_sum += run.wall_seconds;
      if (run.diverged) {
        any_divergence = true;
        continue;
      }
      const double cost = -run.solution.reward;
      cost_sum += cost;
      gap_sum += reference[i] > 0 ? (cost - reference[i]) / reference[i] : 0.0;
      ++valid;

      std::ostringstream tname;
      tname << cfg.out_dir << "/traces/trace_" << label << "_" << i << ".csv";
      std::ostringstream body;
      body << "candidate_count,incumbent_cost,wall_nanos,phase\n";
      for (const TracePoint& p : run.curve)
        body << p.candidate_count << "," << format_double(p.incumbent_cost) << "," << p.wall_nanos
             << "," << p.phase << "\n";
      detail::write_text_file(tname.str(), body.str());
      if (!run.adapt_rows.empty()) {
        std::ostringstream aname;
        aname << cfg.out_dir << "/traces/adapt_" << label << "_" << i << ".csv";
        std::ostringstream abody;
        write_adapt_trace_csv(abody, run.adapt_rows);
        detail::write_text_file(aname.str(), abody.str());
      }
    }
    Json mj;
    mj["name"] = label;
    mj["mean_cost"] = valid > 0 ? cost_sum / valid : std::numeric_limits<double>::quiet_NaN();
    mj["mean_gap_percent"] =
        valid > 0 ? 100.0 * gap_sum / valid : std::numeric_limits<double>::quiet_NaN();
    mj["diverged_instances"] = static_cast<int>(n_inst) - valid;
    mj["instances"] = std::move(rows);
    methods_json.push_back(std::move(mj));

    Json tj;
    tj["name"] = label;
    tj["wall_seconds_total"] = wall_sum;
    timings.push_back(std::move(tj));
  }
  report["methods"] = std::move(methods_json);
  detail::write_json_file(cfg.out_dir + "/report.json", report);
  Json timing_doc;
  timing_doc["methods"] = std::move(timings);
  detail::write_json_file(cfg.out_dir + "/timings.json", timing_doc);

  for (const Json& mj : report.at("methods"))
    std::cout << mj.at("name").get<std::string>() << ": mean_cost="
              << mj.at("mean_cost").get<double>()
              << " mean_gap%=" << mj.at("mean_gap_percent").get<double>() << "\n";
  return CompareOutcome{any_divergence ? 3 : 0, std::move(report)};
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

template <typename P>
int cmd_solve_impl(const ExperimentConfig& cfg) {
  if (cfg.methods.size() != 1) throw ConfigError("solve needs exactly one method");
  const std::vector<typename P::Instance> instances = detail::load_instances<P>(cfg);
  const PolicyParams params = detail::load_policy<P>(cfg);
  const MethodSpec& spec = cfg.methods.front().spec;
  const std::size_t n_inst = instances.size();

  struct SolveRow {
    double cost = 0.0;
    int variant = 0;
    std::int64_t consumed = 0;
    bool diverged = false;
    std::vector<Action> actions;
  };
  std::vector<SolveRow> rows(n_inst);

  parallel_for(n_inst, worker_count(), [&](std::size_t i) {
    SolveRow row;
    if (cfg.augment) {
      std::vector<typename P::Instance> variants;
      if constexpr (std::is_same_v<P, TspProblem> || std::is_same_v<P, CvrpProblem>)
        variants = augment_x8(instances[i]);
      else
        throw ConfigError("x8 augmentation is not defined for ffsp");
      double best_cost = std::numeric_limits<double>::infinity();
      for (int k = 0; k < static_cast<int>(variants.size()); ++k) {
        const MethodRun run = run_with_budget<P>(spec, params, variants[k], cfg.budget,
                                                 derive_seed(cfg.seed, i, 9000 + k));
        row.consumed += run.consumed;
        if (run.diverged) {
          row.diverged = true;
          continue;
        }
        // Isometric variants preserve costs: replay on the original instance.
        const double cost = -P::reward(instances[i], run.solution.actions);
        if (cost < best_cost) {
          best_cost = cost;
          row.variant = k;
          row.actions = run.solution.actions;
        }
      }
      row.cost = best_cost;
    } else {
      const MethodRun run =
          run_with_budget<P>(spec, params, instances[i], cfg.budget, derive_seed(cfg.seed, i, 9000));
      row.consumed = run.consumed;
      row.diverged = run.diverged;
      row.cost = -run.solution.reward;
      row.actions = run.solution.actions;
      row.variant = 0;
    }
    rows[i] = std::move(row);
  });

  detail::ensure_dir(cfg.out_dir);
  Json report;
  report["problem"] = cfg.raw.at("problem");
  report["method"] = cfg.methods.front().label;
  report["budget"] = cfg.budget;
  report["augment"] = cfg.augment;
  report["seed"] = cfg.seed;
  bool any_divergence = false;
  double cost_sum = 0.0;
  Json inst_rows = Json::array();
  for (const SolveRow& row : rows) {
    Json r;
    r["cost"] = row.cost;
    r["variant"] = row.variant;
    r["consumed"] = row.consumed;
    r["diverged"] = row.diverged;
    r["solution"] = row.actions;
    inst_rows.push_back(std::move(r));
    any_divergence = any_divergence || row.diverged;
    cost_sum += row.cost;
  }
  report["mean_cost"] = cost_sum / static_cast<double>(n_inst);
  report["instances"] = std::move(inst_rows);
  detail::write_json_file(cfg.out_dir + "/solve_report.json", report);
  std::cout << cfg.methods.front().label << ": mean_cost="
            << report.at("mean_cost").get<double>() << " over " << n_inst << " instances\n";
  return any_divergence ? 3 : 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

template <typename P>
int cmd_sweep_impl(const ExperimentConfig& cfg) {
  if (!cfg.raw.contains("sweep")) throw ConfigError("missing 'sweep' section");
  const Json& sj = cfg.raw.at("sweep");
  const std::vector<int> betas = detail::get_or<std::vector<int>>(sj, "betas", {1, 2, 4, 8});
  const std::vector<int> gammas = detail::get_or<std::vector<int>>(sj, "gammas", {4});
  const std::string method_name_str = detail::get_or<std::string>(sj, "method", "sgbs");
  Method method;
  if (!parse_method(method_name_str, method) ||
      (method != Method::kSgbs && method != Method::kSgbsEas))
    throw ConfigError("sweep method must be sgbs or sgbs-eas");
  // budget 0 in the sweep section means matched-tree (run to completion).
  const std::int64_t grid_budget = detail::get_or<std::int64_t>(sj, "budget", 0);
  const std::int64_t effective_budget =
      grid_budget > 0 ? grid_budget : std::numeric_limits<std::int64_t>::max() / 4;

  const std::vector<typename P::Instance> instances = detail::load_instances<P>(cfg);
  const PolicyParams params = detail::load_policy<P>(cfg);

  MethodSpec base_spec;
  base_spec.method = method;
  if (cfg.raw.contains("methods") && !cfg.raw.at("methods").empty())
    base_spec = parse_method_spec(cfg.raw.at("methods").at(0));
  base_spec.method = method;

  detail::ensure_dir(cfg.out_dir);
  std::ostringstream csv;
  csv << "beta,gamma,mean_cost,rollouts,wall_nanos\n";
  for (int beta : betas) {
    for (int gamma : gammas) {
      MethodSpec spec = base_spec;
      spec.sgbs_config.beam_width = beta;
      spec.sgbs_config.expansion_factor = gamma;
      double cost_sum = 0.0;
      std::int64_t rollouts = 0;
      double wall = 0.0;
      std::vector<MethodRun> cell(instances.size());
      parallel_for(instances.size(), worker_count(), [&](std::size_t i) {
        cell[i] = run_with_budget<P>(spec, params, instances[i], effective_budget,
                                     derive_seed(cfg.seed, i, 70000 + beta * 100 + gamma));
      });
      for (const MethodRun& run : cell) {
        cost_sum += -run.solution.reward;
        rollouts += run.consumed;
        wall += run.wall_seconds;
      }
      csv << beta << "," << gamma << ","
          << format_double(cost_sum / static_cast<double>(instances.size())) << "," << rollouts
          << "," << static_cast<std::int64_t>(wall * 1e9) << "\n";
    }
  }
  detail::write_text_file(cfg.out_dir + "/sweep.csv", csv.str());
  std::cout << "sweep grid written to " << cfg.out_dir << "/sweep.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pretrain
// ---------------------------------------------------------------------------

template <typename P>
int cmd_pretrain_impl(const ExperimentConfig& cfg) {
  PretrainConfig pc;
  pc.seed = cfg.seed;
  if (cfg.raw.contains("pretrain")) {
    const Json& pj = cfg.raw.at("pretrain");
    pc.learning_rate = detail::get_or<double>(pj, "learning_rate", 0.02);
    pc.samples_per_instance = detail::get_or<int>(pj, "samples_per_instance", 16);
    pc.num_instances = detail::get_or<int>(pj, "num_instances", 64);
    pc.entropy_coeff = detail::get_or<double>(pj, "entropy_coeff", 0.0);
    pc.epochs = detail::get_or<int>(pj, "epochs", 10);
    pc.heldout_instances = detail::get_or<int>(pj, "heldout_instances", 32);
  }
  const ProblemSpec& prob = cfg.problem;
  const std::uint64_t gen_seed = cfg.instances_seed;
  const auto factory = [&prob, gen_seed](std::int64_t i) {
    return detail::generate_for<P>(prob, gen_seed, i);
  };

  PretrainResult res;
  try {
    res = pretrain<P>(pc, factory, detail::load_policy<P>(cfg));
  } catch (const DivergenceError& e) {
    std::cerr << "pretraining diverged: " << e.what() << "\n";
    return 3;
  }

  detail::ensure_dir(cfg.out_dir);
  std::ostringstream curve;
  curve << "epoch,heldout_mean_cost\n";
  for (const PretrainCurvePoint& p : res.curve)
    curve << p.epoch << "," << format_double(p.heldout_mean_cost) << "\n";
  detail::write_text_file(cfg.out_dir + "/curve.csv", curve.str());
  for (std::size_t e = 0; e < res.checkpoints.size(); ++e) {
    std::ostringstream name;
    name << cfg.out_dir << "/ckpt_epoch_" << e << ".txt";
    save_checkpoint_file(name.str(), res.checkpoints[e]);
  }

  // Early-stop selection: probe every checkpoint with a short adaptation
  // run on a validation set and keep the argmin mean cost.
  int selected = static_cast<int>(res.checkpoints.size()) - 1;
  Json selection;
  if (cfg.raw.contains("probe")) {
    const Json& qj = cfg.raw.at("probe");
    const int probe_count = detail::get_or<int>(qj, "instances", 8);
    const std::int64_t probe_budget = detail::get_or<std::int64_t>(qj, "budget", 2000);
    EasConfig probe_cfg;
    probe_cfg.alpha = detail::get_or<double>(qj, "alpha", 0.1);
    probe_cfg.imitation_weight = detail::get_or<double>(qj, "lambda", 1.0);
    probe_cfg.samples_per_iter = detail::get_or<int>(qj, "samples", 16);
    probe_cfg.sgbs_config.beam_width = detail::get_or<int>(qj, "beta", 4);
    probe_cfg.sgbs_config.expansion_factor = detail::get_or<int>(qj, "gamma", 4);
    std::vector<typename P::Instance> probe_set;
    for (int i = 0; i < probe_count; ++i)
      probe_set.push_back(factory(pc.num_instances + pc.heldout_instances + i));
    std::vector<double> scores(res.checkpoints.size(), 0.0);
    for (std::size_t e = 0; e < res.checkpoints.size(); ++e) {
      std::vector<double> probe_costs(probe_set.size());
      parallel_for(probe_set.size(), worker_count(), [&](std::size_t i) {
        SearchLog log(probe_budget);
        Rng rng(derive_seed(cfg.seed, 555, e * 1000 + i));
        const AdaptResult r = sgbs_eas<P>(res.checkpoints[e], probe_set[i], probe_cfg, log, rng);
        probe_costs[i] = -r.solution.reward;
      });
      for (double c : probe_costs) scores[e] += c;
      scores[e] /= static_cast<double>(probe_set.size());
    }
    selected = 0;
    for (std::size_t e = 1; e < scores.size(); ++e)
      if (scores[e] < scores[selected]) selected = static_cast<int>(e);
    Json sj = Json::array();
    for (double s : scores) sj.push_back(s);
    selection["probe_scores"] = std::move(sj);
  }
  selection["selected_epoch"] = selected;
  save_checkpoint_file(cfg.out_dir + "/best.ckpt", res.checkpoints[selected]);
  detail::write_json_file(cfg.out_dir + "/selection.json", selection);
  std::cout << "pretrained " << res.checkpoints.size() << " epochs; selected epoch " << selected
            << " -> " << cfg.out_dir << "/best.ckpt\n";
  return 0;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

template <typename Fn>
auto with_problem(ProblemKind kind, Fn&& fn) {
  switch (kind) {
    case ProblemKind::kTsp: return fn(TspProblem{});
    case ProblemKind::kCvrp: return fn(CvrpProblem{});
    case ProblemKind::kFfsp: return fn(FfspProblem{});
  }
  throw ConfigError("unreachable problem kind");
}

inline int cmd_generate(const Json& j) {
  const ExperimentConfig cfg = parse_experiment_config(j);
  return with_problem(cfg.problem.kind,
                      [&](auto tag) { return cmd_generate_impl<decltype(tag)>(cfg); });
}

inline int cmd_compare(const Json& j) {
  const ExperimentConfig cfg = parse_experiment_config(j);
  return with_problem(cfg.problem.kind, [&](auto tag) {
    return cmd_compare_impl<decltype(tag)>(cfg).exit_code;
  });
}

inline int cmd_solve(const Json& j) {
  const ExperimentConfig cfg = parse_experiment_config(j);
  return with_problem(cfg.problem.kind,
                      [&](auto tag) { return cmd_solve_impl<decltype(tag)>(cfg); });
}

inline int cmd_sweep(const Json& j) {
  const ExperimentConfig cfg = parse_experiment_config(j);
  return with_problem(cfg.problem.kind,
                      [&](auto tag) { return cmd_sweep_impl<decltype(tag)>(cfg); });
}

inline int cmd_pretrain(const Json& j) {
  const ExperimentConfig cfg = parse_experiment_config(j);
  return with_problem(cfg.problem.kind,
                      [&](auto tag) { return cmd_pretrain_impl<decltype(tag)>(cfg); });
}

}  // namespace sgbs

#endif  // SGBS_HARNESS_HPP
