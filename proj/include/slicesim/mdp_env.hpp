#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slicesim/cost.hpp"
#include "slicesim/domain.hpp"
#include "slicesim/operation.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

// Normalization bounds for state encoding and the range used when scaling
// actions to resource amounts.
struct NormBounds {
  double lambda_max = 8.0;  // vehicles per region
  int h_max = 10;           // cloud VMs per slice
};

// State layout: [lambda (J) ; activation (M, macros fixed 1) ;
// b (K*M, k-major) ; c (K*M) ; h (K)], every block min-max scaled to [0,1].
int state_size(int num_slices, const Topology& topo);
// Action layout matches the raw plan vector: [o (M_s) ; b ; c ; h] in [-1,1].
int action_size(int num_slices, const Topology& topo);

std::vector<double> encode_state(const DensityMap& density, const PlanningDecision& prev_plan,
                                 const Topology& topo, const NormBounds& bounds);

// Raw action in [-1,1] that projects back onto exactly this plan.
std::vector<double> plan_to_action(const PlanningDecision& plan, const Topology& topo,
                                   const NormBounds& bounds);

// One replay tuple.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
};

// Per-window densities, from the synthetic pattern or a loaded trace
// (cycled when the episode is longer than the trace).
struct DensitySource {
  std::optional<DensityPattern> pattern;
  std::vector<DensityMap> trace;

  DensityMap density_for(int window, std::uint64_t episode_seed) const;
};

struct EnvScenario {
  Topology topo;
  std::vector<SliceSpec> slices;
  RadioParams radio;
  ComputeParams compute;
  CostParams cost;
  DensitySource density;
  NormBounds bounds;
  double shadowing_sigma_db = 8.0;
  int slots_per_window = 60;
  double slot_seconds = 1.0;
  int windows = 24;  // W
  PlanningDecision initial_plan;
};

DensityMap window_density(const EnvScenario& sc, std::uint64_t episode_seed, int window);
// The slot stream for one window; shared verbatim with the benchmark planner
// so both schemes face identical traffic under a common seed.
WindowTraffic make_window_traffic(const EnvScenario& sc, std::uint64_t episode_seed, int window);

// One planning window per step: decode the action into a feasible plan, run
// the small-timescale engine, reward = -window cost.
class SliceEnv {
 public:
  explicit SliceEnv(EnvScenario scenario);

  std::vector<double> reset(std::uint64_t episode_seed);

  struct StepResult {
    double reward = 0.0;
    std::vector<double> next_state;
    CostBreakdown cost;
    std::vector<double> mean_delay;
    PlanningDecision plan;
    bool episode_done = false;
  };
  StepResult step(std::span<const double> action);

  int window() const { return window_; }
  const EnvScenario& scenario() const { return sc_; }
  const PlanningDecision& previous_plan() const { return prev_plan_; }
  const QueueState& queues() const { return queues_; }

 private:
  EnvScenario sc_;
  std::uint64_t episode_seed_ = 0;
  int window_ = 1;
  QueueState queues_;
  PlanningDecision prev_plan_;
};

}  // namespace slicesim
