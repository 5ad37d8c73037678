#pragma once

#include <span>
#include <vector>

#include "slicesim/domain.hpp"

namespace slicesim {

// The printed middle branch of the SLA revenue function increases with delay;
// Decreasing swaps it for the ramp that falls from q_b to 0 across
// [soft_deadline, deadline].
enum class SlaRamp { AsPrinted, Decreasing };

struct CostParams {
  double q_d = 1.0;   // per activated SBS per window
  double q_r = 0.1;   // per reserved resource unit per window
  double q_s = 0.5;   // per upward-adjusted resource unit
  double q_b = 5.0;   // top revenue per slice per window
  double q_p = 10.0;  // penalty per slice per window
  SlaRamp ramp = SlaRamp::AsPrinted;

  void validate() const;  // all positive, q_p > q_b
};

// q_d * sum of SBS activation flags
double deployment_cost(const PlanningDecision& plan, const Topology& topo,
                       const CostParams& params);

// q_r * sum_k (h_k + sum_m o_m*(b_km + c_km)), macros always on
double provisioning_cost(const PlanningDecision& plan, const Topology& topo,
                         const CostParams& params);

// q_s * positive part of per-resource increases, gated per station on being
// deployed in both windows; cloud terms are always gated on.
double adjustment_cost(const PlanningDecision& plan, const PlanningDecision& prev,
                       const Topology& topo, const CostParams& params);

// Piece-wise SLA revenue of one slice given its window-average delay.
double sla_revenue(double mean_delay_s, const SliceSpec& slice, const CostParams& params);

struct CostBreakdown {
  double deployment = 0.0;    // Phi_d
  double provisioning = 0.0;  // Phi_p
  double adjustment = 0.0;    // Phi_s
  double sla_revenue = 0.0;   // Phi_q
  double total = 0.0;         // ((Phi_d + Phi_p) + Phi_s) - Phi_q, in that order
};

CostBreakdown window_cost(const PlanningDecision& plan, const PlanningDecision& prev,
                          std::span<const double> mean_delay,
                          const std::vector<SliceSpec>& slices, const Topology& topo,
                          const CostParams& params);

}  // namespace slicesim
