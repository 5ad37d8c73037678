#pragma once

#include <span>
#include <vector>

#include "slicesim/domain.hpp"
#include "slicesim/traffic.hpp"

namespace slicesim {

double dbm_to_watts(double dbm);

// Uplink radio constants. Linear fields are derived once from the dBm inputs
// so the hot path never converts.
struct RadioParams {
  double subcarrier_bandwidth_hz = 20e6;  // beta
  double tx_power_dbm = 27.0;
  double noise_dbm_per_hz = -174.0;
  double interference_dbm_per_hz = -164.0;

  double tx_power_w = 0.0;
  double noise_w_per_hz = 0.0;
  double interference_w_per_hz = 0.0;

  static RadioParams from_dbm(double beta_hz, double tx_dbm, double noise_dbm,
                              double interference_dbm);
};

struct ComputeParams {
  double edge_vm_hz = 10e9;     // F_e
  double cloud_vm_hz = 100e9;   // F_c
  double backbone_rtt_s = 0.15; // d_r
};

// R = beta * log2(1 + P_v*g / (beta*N_o + beta*I)), bits/s
double subcarrier_rate(double gain, const RadioParams& radio);

// Minimizer of sum_n xi/(y_n*b*R_n) over the simplex:
// y_n* = sqrt(1/R_n) / sum_i sqrt(1/R_i). Throws on empty or non-positive rates.
std::vector<double> allocate_spectrum(std::span<const double> rates);

double offloading_delay(double task_bits, double fraction, int subcarriers, double rate);

// (Q + (A - x + 1)*xi/2) * eta / (c * F_e)
double edge_delay(double backlog_bits, int arrivals, int dispatched, double task_bits,
                  double cycles_per_bit, int edge_vms, double edge_vm_hz);

// d_r + xi*eta/(h*F_c)
double cloud_delay(double task_bits, double cycles_per_bit, int cloud_vms, double cloud_vm_hz,
                   double rtt_s);

// Integer minimizer of Psi(x) = d_e(x)*(A-x) + d_c*x over {0..A}, computed as
// the clamped stationary point of the convex quadratic followed by a
// floor/ceil comparison (ties -> smaller x). With no edge VMs and pending
// tasks every task goes to the cloud.
int dispatch_tasks(int arrivals, double backlog_bits, double task_bits, double cycles_per_bit,
                   int edge_vms, double edge_vm_hz, int cloud_vms, double cloud_vm_hz,
                   double rtt_s);

// Per-slot, per-slice operation decisions. Vehicles whose nearest station has
// no subcarriers reserved for a slice are re-associated to the nearest macro
// station for that slice, so the effective grouping can differ from the
// physical one in SlotObservation.
struct OperationDecision {
  std::vector<std::vector<int>> effective_station;   // [k][n]
  std::vector<std::vector<double>> rate;             // [k][n] subcarrier rate to effective station
  std::vector<std::vector<double>> spectrum_fraction;// y[k][n], sums to 1 per (k, station) group
  ResourceGrid effective_arrivals;                   // A'[k][m]
  ResourceGrid dispatched;                           // x[k][m]
  int forced_cloud_events = 0;                       // (k,m) solves with tasks but no edge VMs
};

OperationDecision decide_slot(const SlotObservation& obs, const PlanningDecision& plan,
                              const QueueState& queues, const std::vector<SliceSpec>& slices,
                              const Topology& topo, const RadioParams& radio,
                              const ComputeParams& compute);

struct SliceSlotDelay {
  double total = 0.0;    // D_k^t
  double offload = 0.0;  // first term of D_k^t
  double edge = 0.0;     // edge share of the processing term
  double cloud = 0.0;    // cloud share of the processing term
  long tasks = 0;        // total effective arrivals this slot
};

struct SlotDelayReport {
  int slot = 0;
  std::vector<SliceSlotDelay> slices;
};

// Average per-task delay of the slot. Terms with an empty denominator (no
// vehicles / no tasks) contribute zero. Throws on infeasible decisions.
SlotDelayReport slot_delay(const SlotObservation& obs, const PlanningDecision& plan,
                           const OperationDecision& decision, const QueueState& queues,
                           const std::vector<SliceSpec>& slices, const Topology& topo,
                           const ComputeParams& compute);

// Q' = max(0, Q + (A - x)*xi - c*F_e*T_o/eta) per (k, m), with A the
// effective arrivals carried by the decision.
QueueState update_queue(const QueueState& queues, const OperationDecision& decision,
                        const PlanningDecision& plan, const std::vector<SliceSpec>& slices,
                        const ComputeParams& compute, double slot_seconds);

struct WindowTraffic {
  std::vector<SlotObservation> slots;
};

struct WindowResult {
  std::vector<double> mean_delay;   // per slice; slots without tasks excluded
  std::vector<int> counted_slots;   // per slice
  QueueState queues;
  std::vector<SlotDelayReport> slot_reports;  // empty unless requested
  int forced_cloud_events = 0;
};

// Runs the whole small-timescale loop for one window: per slot and per
// (slice, station) the closed-form solvers, then delay accounting and the
// queue recursion. Slices are independent given the traffic.
WindowResult run_window(const PlanningDecision& plan, const WindowTraffic& traffic,
                        const QueueState& queues_in, const std::vector<SliceSpec>& slices,
                        const Topology& topo, const RadioParams& radio,
                        const ComputeParams& compute, double slot_seconds,
                        bool keep_slot_reports = true);

// Single-slice window evaluation against explicit resource rows; the per-slice
// building block of run_window, also used by the benchmark planner's search.
struct SliceWindowResult {
  double mean_delay = 0.0;
  int counted_slots = 0;
  std::vector<double> queue_row_out;  // per station, bits
  int forced_cloud_events = 0;
};

SliceWindowResult run_window_slice(int slice_idx, std::span<const int> spectrum_row,
                                   std::span<const int> compute_row, int cloud_vms,
                                   std::span<const double> queue_row_in,
                                   const WindowTraffic& traffic,
                                   const std::vector<SliceSpec>& slices, const Topology& topo,
                                   const RadioParams& radio, const ComputeParams& compute,
                                   double slot_seconds,
                                   std::vector<SliceSlotDelay>* slot_out = nullptr);

}  // namespace slicesim
