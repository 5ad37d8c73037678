#include "slicesim/cost.hpp"

#include <algorithm>
#include <stdexcept>

namespace slicesim {

void CostParams::validate() const {
  if (q_d <= 0 || q_r <= 0 || q_s <= 0 || q_b <= 0 || q_p <= 0)
    throw std::invalid_argument("cost: unit prices must be > 0");
  if (q_p <= q_b) throw std::invalid_argument("cost: q_p must exceed q_b");
}

double deployment_cost(const PlanningDecision& plan, const Topology&, const CostParams& params) {
  int active = 0;
  for (int flag : plan.activation) active += flag;
  return params.q_d * active;
}

double provisioning_cost(const PlanningDecision& plan, const Topology& topo,
                         const CostParams& params) {
  const int num_slices = plan.spectrum.slices;
  double units = 0.0;
  for (int k = 0; k < num_slices; ++k) {
    units += plan.cloud[k];
    for (int m = 0; m < topo.num_stations(); ++m) {
      if (!plan.station_active(topo, m)) continue;
      units += plan.spectrum.at(k, m) + plan.compute.at(k, m);
    }
  }
  return params.q_r * units;
}

namespace {
inline int pos_part(int d) { return d > 0 ? d : 0; }
}  // namespace

double adjustment_cost(const PlanningDecision& plan, const PlanningDecision& prev,
                       const Topology& topo, const CostParams& params) {
  if (!plan.spectrum.same_shape(prev.spectrum) || plan.cloud.size() != prev.cloud.size())
    throw std::invalid_argument("adjustment_cost: plan shapes differ");
  const int num_slices = plan.spectrum.slices;
  long units = 0;
  for (int k = 0; k < num_slices; ++k) {
    units += pos_part(plan.cloud[k] - prev.cloud[k]);
    for (int m = 0; m < topo.num_stations(); ++m) {
      const bool both = plan.station_active(topo, m) && prev.station_active(topo, m);
      if (!both) continue;
      units += pos_part(plan.spectrum.at(k, m) - prev.spectrum.at(k, m));
      units += pos_part(plan.compute.at(k, m) - prev.compute.at(k, m));
    }
  }
  return params.q_s * units;
}

double sla_revenue(double mean_delay_s, const SliceSpec& slice, const CostParams& params) {
  const double soft = slice.soft_deadline_s;
  const double hard = slice.deadline_s;
  if (mean_delay_s < soft) return params.q_b;
  if (mean_delay_s > hard) return -params.q_p;
  if (params.ramp == SlaRamp::AsPrinted)
    return params.q_b * (mean_delay_s - soft) / (hard - soft);
  return params.q_b * (hard - mean_delay_s) / (hard - soft);
}

CostBreakdown window_cost(const PlanningDecision& plan, const PlanningDecision& prev,
                          std::span<const double> mean_delay,
                          const std::vector<SliceSpec>& slices, const Topology& topo,
                          const CostParams& params) {
  if (mean_delay.size() != slices.size())
    throw std::invalid_argument("window_cost: one mean delay per slice required");
  CostBreakdown b;
  b.deployment = deployment_cost(plan, topo, params);
  b.provisioning = provisioning_cost(plan, topo, params);
  b.adjustment = adjustment_cost(plan, prev, topo, params);
  double revenue = 0.0;
  for (size_t k = 0; k < slices.size(); ++k)
    revenue += sla_revenue(mean_delay[k], slices[k], params);
  b.sla_revenue = revenue;
  b.total = ((b.deployment + b.provisioning) + b.adjustment) - b.sla_revenue;
  return b;
}

}  // namespace slicesim
