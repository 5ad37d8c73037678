#include "slicesim/operation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slicesim {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

RadioParams RadioParams::from_dbm(double beta_hz, double tx_dbm, double noise_dbm,
                                  double interference_dbm) {
  if (beta_hz <= 0) throw std::invalid_argument("radio: subcarrier bandwidth must be > 0");
  RadioParams r;
  r.subcarrier_bandwidth_hz = beta_hz;
  r.tx_power_dbm = tx_dbm;
  r.noise_dbm_per_hz = noise_dbm;
  r.interference_dbm_per_hz = interference_dbm;
  r.tx_power_w = dbm_to_watts(tx_dbm);
  r.noise_w_per_hz = dbm_to_watts(noise_dbm);
  r.interference_w_per_hz = dbm_to_watts(interference_dbm);
  return r;
}

double subcarrier_rate(double gain, const RadioParams& radio) {
  if (gain <= 0) throw std::invalid_argument("subcarrier_rate: gain must be > 0");
  const double beta = radio.subcarrier_bandwidth_hz;
  const double denom = beta * radio.noise_w_per_hz + beta * radio.interference_w_per_hz;
  return beta * std::log2(1.0 + radio.tx_power_w * gain / denom);
}

std::vector<double> allocate_spectrum(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("allocate_spectrum: no vehicles");
  std::vector<double> weight(rates.size());
  double sum = 0.0;
  for (size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0) throw std::invalid_argument("allocate_spectrum: rates must be > 0");
    weight[i] = std::sqrt(1.0 / rates[i]);
    sum += weight[i];
  }
  for (auto& w : weight) w /= sum;
  return weight;
}

double offloading_delay(double task_bits, double fraction, int subcarriers, double rate) {
  if (task_bits < 0) throw std::invalid_argument("offloading_delay: task_bits must be >= 0");
  if (fraction <= 0 || rate <= 0)
    throw std::invalid_argument("offloading_delay: fraction and rate must be > 0");
  if (subcarriers < 0) throw std::invalid_argument("offloading_delay: negative subcarriers");
  if (task_bits == 0) return 0.0;
  // no spectrum reserved: surfaces as an infinite delay in the accounting
  return task_bits / (fraction * subcarriers * rate);
}

double edge_delay(double backlog_bits, int arrivals, int dispatched, double task_bits,
                  double cycles_per_bit, int edge_vms, double edge_vm_hz) {
  if (edge_vms < 1) throw std::invalid_argument("edge_delay: no edge compute reserved");
  if (dispatched < 0 || dispatched > arrivals)
    throw std::invalid_argument("edge_delay: dispatched out of range");
  return (backlog_bits + (arrivals - dispatched + 1) * task_bits / 2.0) * cycles_per_bit /
         (edge_vms * edge_vm_hz);
}

double cloud_delay(double task_bits, double cycles_per_bit, int cloud_vms, double cloud_vm_hz,
                   double rtt_s) {
  if (cloud_vms < 1) throw std::invalid_argument("cloud_delay: cloud VMs must be >= 1");
  return rtt_s + task_bits * cycles_per_bit / (cloud_vms * cloud_vm_hz);
}

int dispatch_tasks(int arrivals, double backlog_bits, double task_bits, double cycles_per_bit,
                   int edge_vms, double edge_vm_hz, int cloud_vms, double cloud_vm_hz,
                   double rtt_s) {
  if (arrivals < 0) throw std::invalid_argument("dispatch_tasks: negative arrivals");
  if (cloud_vms < 1) throw std::invalid_argument("dispatch_tasks: cloud VMs must be >= 1");
  if (arrivals == 0) return 0;
  if (edge_vms < 1) return arrivals;  // nothing can be processed locally

  const double nu1 = cycles_per_bit / (edge_vms * edge_vm_hz);
  const double nu2 = rtt_s + cycles_per_bit * task_bits / (cloud_vms * cloud_vm_hz);
  const double nu3 = backlog_bits + (arrivals + 1) * task_bits / 2.0;
  const double x_cont =
      std::clamp((nu1 * nu3 + task_bits * nu1 * arrivals / 2.0 - nu2) / (nu1 * task_bits), 0.0,
                 double(arrivals));

  const auto psi = [&](int x) {
    return edge_delay(backlog_bits, arrivals, x, task_bits, cycles_per_bit, edge_vms,
                      edge_vm_hz) *
               (arrivals - x) +
           cloud_delay(task_bits, cycles_per_bit, cloud_vms, cloud_vm_hz, rtt_s) * x;
  };
  const int lo = static_cast<int>(std::floor(x_cont));
  const int hi = static_cast<int>(std::ceil(x_cont));
  if (lo == hi) return lo;
  return psi(lo) <= psi(hi) ? lo : hi;
}

namespace {

// Vehicle grouping for one slice under a spectrum row: nearest station when it
// has subcarriers for the slice, otherwise the nearest macro station.
std::vector<int> effective_stations(const SlotObservation& obs, std::span<const int> spectrum_row,
                                    const Topology& topo) {
  std::vector<int> eff(obs.vehicles.size());
  for (size_t n = 0; n < obs.vehicles.size(); ++n) {
    const int phys = obs.vehicles[n].associated_bs;
    eff[n] = spectrum_row[phys] > 0 ? phys : topo.nearest_macro(obs.vehicles[n].position);
  }
  return eff;
}

}  // namespace

OperationDecision decide_slot(const SlotObservation& obs, const PlanningDecision& plan,
                              const QueueState& queues, const std::vector<SliceSpec>& slices,
                              const Topology& topo, const RadioParams& radio,
                              const ComputeParams& compute) {
  const int num_slices = static_cast<int>(slices.size());
  const int m_all = topo.num_stations();
  if (plan.spectrum.slices != num_slices || queues.slices != num_slices ||
      queues.stations != m_all ||
      static_cast<int>(obs.arrivals.size()) != num_slices)
    throw std::invalid_argument("decide_slot: dimension mismatch");

  OperationDecision dec;
  dec.effective_station.assign(num_slices, {});
  dec.rate.assign(num_slices, std::vector<double>(obs.vehicles.size(), 0.0));
  dec.spectrum_fraction.assign(num_slices, std::vector<double>(obs.vehicles.size(), 0.0));
  dec.effective_arrivals = ResourceGrid(num_slices, m_all);
  dec.dispatched = ResourceGrid(num_slices, m_all);

  for (int k = 0; k < num_slices; ++k) {
    std::span<const int> b_row(plan.spectrum.values.data() + static_cast<size_t>(k) * m_all,
                               m_all);
    dec.effective_station[k] = effective_stations(obs, b_row, topo);

    std::vector<std::vector<int>> members(m_all);
    for (size_t n = 0; n < obs.vehicles.size(); ++n)
      members[dec.effective_station[k][n]].push_back(static_cast<int>(n));

    for (int m = 0; m < m_all; ++m) {
      if (!members[m].empty()) {
        std::vector<double> rates;
        rates.reserve(members[m].size());
        for (int n : members[m])
          rates.push_back(subcarrier_rate(obs.vehicles[n].gain[m], radio));
        const auto y = allocate_spectrum(rates);
        for (size_t i = 0; i < members[m].size(); ++i) {
          dec.rate[k][members[m][i]] = rates[i];
          dec.spectrum_fraction[k][members[m][i]] = y[i];
        }
        int agg = 0;
        for (int n : members[m]) agg += obs.arrivals[k][n];
        dec.effective_arrivals.at(k, m) = agg;
      }
      const int a = dec.effective_arrivals.at(k, m);
      if (a > 0 && plan.compute.at(k, m) < 1) ++dec.forced_cloud_events;
      dec.dispatched.at(k, m) =
          dispatch_tasks(a, queues.at(k, m), slices[k].task_size_bits,
                         slices[k].compute_cycles_per_bit, plan.compute.at(k, m),
                         compute.edge_vm_hz, plan.cloud[k], compute.cloud_vm_hz,
                         compute.backbone_rtt_s);
    }
  }
  return dec;
}

SlotDelayReport slot_delay(const SlotObservation& obs, const PlanningDecision& plan,
                           const OperationDecision& decision, const QueueState& queues,
                           const std::vector<SliceSpec>& slices, const Topology& topo,
                           const ComputeParams& compute) {
  const int num_slices = static_cast<int>(slices.size());
  const int m_all = topo.num_stations();
  if (static_cast<int>(decision.effective_station.size()) != num_slices ||
      !decision.effective_arrivals.same_shape(decision.dispatched) ||
      decision.effective_arrivals.stations != m_all)
    throw std::invalid_argument("slot_delay: decision dimensions do not match");

  // accumulation order (station outer, vehicle index inner) must match
  // run_window_slice so both paths agree bit for bit
  SlotDelayReport rep;
  rep.slot = obs.slot;
  rep.slices.resize(num_slices);
  const size_t n_vehicles = obs.vehicles.size();
  for (int k = 0; k < num_slices; ++k) {
    auto& out = rep.slices[k];
    double offload_sum = 0.0;
    double edge_sum = 0.0, cloud_sum = 0.0;
    long total_tasks = 0;
    for (int m = 0; m < m_all; ++m) {
      for (size_t n = 0; n < n_vehicles; ++n) {
        if (decision.effective_station[k][n] != m) continue;
        offload_sum += offloading_delay(slices[k].task_size_bits,
                                        decision.spectrum_fraction[k][n],
                                        plan.spectrum.at(k, m), decision.rate[k][n]);
      }
      const int a = decision.effective_arrivals.at(k, m);
      const int x = decision.dispatched.at(k, m);
      if (x < 0 || x > a)
        throw std::invalid_argument("slot_delay: dispatch decision infeasible");
      total_tasks += a;
      if (a - x > 0)
        edge_sum += edge_delay(queues.at(k, m), a, x, slices[k].task_size_bits,
                               slices[k].compute_cycles_per_bit, plan.compute.at(k, m),
                               compute.edge_vm_hz) *
                    (a - x);
      if (x > 0)
        cloud_sum += cloud_delay(slices[k].task_size_bits, slices[k].compute_cycles_per_bit,
                                 plan.cloud[k], compute.cloud_vm_hz, compute.backbone_rtt_s) *
                     x;
    }
    out.tasks = total_tasks;
    out.offload = n_vehicles > 0 ? offload_sum / static_cast<double>(n_vehicles) : 0.0;
    out.edge = total_tasks > 0 ? edge_sum / static_cast<double>(total_tasks) : 0.0;
    out.cloud = total_tasks > 0 ? cloud_sum / static_cast<double>(total_tasks) : 0.0;
    out.total = out.offload + out.edge + out.cloud;
  }
  return rep;
}

QueueState update_queue(const QueueState& queues, const OperationDecision& decision,
                        const PlanningDecision& plan, const std::vector<SliceSpec>& slices,
                        const ComputeParams& compute, double slot_seconds) {
  const int num_slices = queues.slices;
  const int m_all = queues.stations;
  if (decision.effective_arrivals.slices != num_slices)
    throw std::invalid_argument("update_queue: dimension mismatch");
  QueueState next(num_slices, m_all);
  for (int k = 0; k < num_slices; ++k) {
    for (int m = 0; m < m_all; ++m) {
      const double in_bits = (decision.effective_arrivals.at(k, m) - decision.dispatched.at(k, m)) *
                             slices[k].task_size_bits;
      const double out_bits = plan.compute.at(k, m) * compute.edge_vm_hz * slot_seconds /
                              slices[k].compute_cycles_per_bit;
      const double q = queues.at(k, m) + in_bits - out_bits;
      next.at(k, m) = q > 0.0 ? q : 0.0;
    }
  }
  return next;
}

WindowResult run_window(const PlanningDecision& plan, const WindowTraffic& traffic,
                        const QueueState& queues_in, const std::vector<SliceSpec>& slices,
                        const Topology& topo, const RadioParams& radio,
                        const ComputeParams& compute, double slot_seconds,
                        bool keep_slot_reports) {
  if (traffic.slots.empty()) throw std::invalid_argument("run_window: needs at least one slot");
  const auto verdict = validate_plan(plan, topo);
  if (!verdict.ok()) throw std::invalid_argument("run_window: infeasible plan: " + verdict.violations.front());

  const int num_slices = static_cast<int>(slices.size());
  WindowResult res;
  res.mean_delay.assign(num_slices, 0.0);
  res.counted_slots.assign(num_slices, 0);
  res.queues = queues_in;
  std::vector<double> delay_sum(num_slices, 0.0);

  for (const auto& obs : traffic.slots) {
    const OperationDecision dec = decide_slot(obs, plan, res.queues, slices, topo, radio, compute);
    const SlotDelayReport rep = slot_delay(obs, plan, dec, res.queues, slices, topo, compute);
    res.queues = update_queue(res.queues, dec, plan, slices, compute, slot_seconds);
    res.forced_cloud_events += dec.forced_cloud_events;
    for (int k = 0; k < num_slices; ++k) {
      if (rep.slices[k].tasks > 0) {
        delay_sum[k] += rep.slices[k].total;
        res.counted_slots[k] += 1;
      }
    }
    if (keep_slot_reports) res.slot_reports.push_back(rep);
  }
  for (int k = 0; k < num_slices; ++k)
    res.mean_delay[k] = res.counted_slots[k] > 0 ? delay_sum[k] / res.counted_slots[k] : 0.0;
  return res;
}

SliceWindowResult run_window_slice(int slice_idx, std::span<const int> spectrum_row,
                                   std::span<const int> compute_row, int cloud_vms,
                                   std::span<const double> queue_row_in,
                                   const WindowTraffic& traffic,
                                   const std::vector<SliceSpec>& slices, const Topology& topo,
                                   const RadioParams& radio, const ComputeParams& compute,
                                   double slot_seconds,
                                   std::vector<SliceSlotDelay>* slot_out) {
  const int m_all = topo.num_stations();
  const SliceSpec& spec = slices[slice_idx];
  SliceWindowResult res;
  res.queue_row_out.assign(queue_row_in.begin(), queue_row_in.end());
  double delay_sum = 0.0;

  for (const auto& obs : traffic.slots) {
    const auto eff = effective_stations(obs, spectrum_row, topo);
    double offload_sum = 0.0, edge_sum = 0.0, cloud_sum = 0.0;
    long total_tasks = 0;
    for (int m = 0; m < m_all; ++m) {
      std::vector<int> members;
      for (size_t n = 0; n < obs.vehicles.size(); ++n)
        if (eff[n] == m) members.push_back(static_cast<int>(n));

      int a = 0;
      if (!members.empty()) {
        std::vector<double> rates;
        rates.reserve(members.size());
        for (int n : members) rates.push_back(subcarrier_rate(obs.vehicles[n].gain[m], radio));
        const auto y = allocate_spectrum(rates);
        for (size_t i = 0; i < members.size(); ++i)
          offload_sum +=
              offloading_delay(spec.task_size_bits, y[i], spectrum_row[m], rates[i]);
        for (int n : members) a += obs.arrivals[slice_idx][n];
      }
      if (a > 0 && compute_row[m] < 1) ++res.forced_cloud_events;
      const int x = dispatch_tasks(a, res.queue_row_out[m], spec.task_size_bits,
                                   spec.compute_cycles_per_bit, compute_row[m],
                                   compute.edge_vm_hz, cloud_vms, compute.cloud_vm_hz,
                                   compute.backbone_rtt_s);
      total_tasks += a;
      if (a - x > 0)
        edge_sum += edge_delay(res.queue_row_out[m], a, x, spec.task_size_bits,
                               spec.compute_cycles_per_bit, compute_row[m], compute.edge_vm_hz) *
                    (a - x);
      if (x > 0)
        cloud_sum += cloud_delay(spec.task_size_bits, spec.compute_cycles_per_bit, cloud_vms,
                                 compute.cloud_vm_hz, compute.backbone_rtt_s) *
                     x;

      const double in_bits = (a - x) * spec.task_size_bits;
      const double out_bits =
          compute_row[m] * compute.edge_vm_hz * slot_seconds / spec.compute_cycles_per_bit;
      const double q = res.queue_row_out[m] + in_bits - out_bits;
      res.queue_row_out[m] = q > 0.0 ? q : 0.0;
    }
    SliceSlotDelay d;
    d.tasks = total_tasks;
    d.offload = !obs.vehicles.empty() ? offload_sum / static_cast<double>(obs.vehicles.size()) : 0.0;
    d.edge = total_tasks > 0 ? edge_sum / static_cast<double>(total_tasks) : 0.0;
    d.cloud = total_tasks > 0 ? cloud_sum / static_cast<double>(total_tasks) : 0.0;
    d.total = d.offload + d.edge + d.cloud;
    if (total_tasks > 0) {
      delay_sum += d.total;
      res.counted_slots += 1;
    }
    if (slot_out) slot_out->push_back(d);
  }
  res.mean_delay = res.counted_slots > 0 ? delay_sum / res.counted_slots : 0.0;
  return res;
}

}  // namespace slicesim
