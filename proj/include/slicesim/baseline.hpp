#pragma once

#include <vector>

#include "slicesim/cost.hpp"
#include "slicesim/domain.hpp"
#include "slicesim/operation.hpp"

namespace slicesim {

// Candidate values per decision coordinate for the benchmark's exhaustive
// search. Activation is implicit: an SBS is deployed exactly when some slice
// holds resources there (an activated-but-empty SBS only adds q_d and is
// never optimal).
struct SearchGrid {
  std::vector<std::vector<int>> spectrum_values;  // per station, ascending, from [0, B_m]
  std::vector<std::vector<int>> compute_values;   // per station, ascending, from [0, C_m]
  std::vector<int> cloud_values;                  // ascending, >= 1

  // {0, step, 2*step, ..., cap} per station (cap always included)
  static SearchGrid quantized(const Topology& topo, int spectrum_step, int vm_step,
                              std::vector<int> cloud_values);
  void validate(const Topology& topo) const;
};

// One-shot planner: evaluates every feasible grid plan on the shared traffic
// sample by simulating the window from the current queue state, scores it by
// deployment + provisioning - SLA revenue (the adjustment cost is
// deliberately not part of the objective), and returns the minimizer; ties go
// to the lexicographically smallest plan vector.
PlanningDecision myopic_plan(const WindowTraffic& traffic, const QueueState& queues_in,
                             const SearchGrid& grid, const std::vector<SliceSpec>& slices,
                             const Topology& topo, const RadioParams& radio,
                             const ComputeParams& compute, const CostParams& cost,
                             double slot_seconds);

}  // namespace slicesim
