#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicesim/baseline.hpp"
#include "slicesim/ddpg.hpp"
#include "slicesim/mdp_env.hpp"

namespace slicesim {

struct TimescaleConfig {
  double slot_seconds = 1.0;     // T_o
  double window_seconds = 600.0; // T_p
  int windows = 24;              // W, windows per episode
  // simulated slots per window; the full scale is window_seconds/slot_seconds,
  // the desk-scale default trims it
  int slots_per_window = 60;

  void validate() const;  // T_p/T_o must be a positive integer
};

struct TrafficConfig {
  std::optional<DensityPattern> pattern;
  std::string trace_path;  // used when pattern is absent
  double shadowing_sigma_db = 8.0;
};

struct BaselineConfig {
  int spectrum_step = 5;
  int vm_step = 5;
  std::vector<int> cloud_values{1, 5, 10};
};

struct EvalConfig {
  std::vector<std::uint64_t> seeds{901, 902, 903, 904, 905};
  std::vector<double> arrival_rates{1.0, 2.0, 3.0};
};

// Whole-experiment configuration; defaults describe the two-slice, two-SBS
// urban scenario. Loadable from a single JSON document (schema in README).
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int episodes = 300;
  std::string out_dir = "out";

  Topology topology;
  std::vector<SliceSpec> slices;
  RadioParams radio;
  ComputeParams compute;
  CostParams cost;
  TimescaleConfig timescales;
  TrafficConfig traffic;
  NormBounds bounds;
  AgentConfig agent;
  BaselineConfig baseline;
  EvalConfig eval;
  std::optional<PlanningDecision> initial_plan;  // defaults to the zero plan
  std::optional<PlanningDecision> simulate_plan; // plan used by the simulate command

  static ExperimentConfig defaults();
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  // materializes the environment scenario (loads the trace when configured)
  EnvScenario scenario() const;
  SearchGrid search_grid() const;
};

}  // namespace slicesim
