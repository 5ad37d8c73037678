#pragma once

#include <string>
#include <vector>

#include "slicesim/domain.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

// Mean vehicle count per region for one planning window.
struct DensityMap {
  int window = 0;
  std::vector<double> mean_vehicles;  // length J
};

// Synthetic diurnal density generator, a stand-in for trace data:
//   lambda_j = max(0, base_j + amp_j * sin(2*pi*w/period + phase_j) + noise)
struct DensityPattern {
  std::vector<double> base;       // length J
  std::vector<double> amplitude;  // length J
  std::vector<double> phase;      // length J
  double period_windows = 24.0;
  double noise_std = 0.0;

  void validate(int num_regions) const;  // throws on bad period / sizes
};

DensityMap gen_density(int window, const DensityPattern& pattern, Rng& rng);

// CSV with header "window,region,density". Windows must form a contiguous
// range and every (window, region) pair must be present exactly once.
std::vector<DensityMap> load_trace(const std::string& path, int num_regions);

struct Vehicle {
  int id = 0;
  Point position;
  int associated_bs = -1;          // nearest station (tie -> lowest id)
  std::vector<double> gain;        // linear channel gain to each station
  double tx_power_dbm = 0.0;
};

// Per-slot snapshot of the network: vehicles with channel gains, task
// arrivals per slice/vehicle, and per-station aggregates under the physical
// nearest-station association.
struct SlotObservation {
  int slot = 0;
  std::vector<Vehicle> vehicles;
  std::vector<std::vector<int>> by_station;  // N_m: vehicle indices per station
  std::vector<std::vector<int>> arrivals;    // a[k][n]
  ResourceGrid aggregate;                    // A[k][m]
};

struct Arrivals {
  std::vector<std::vector<int>> per_vehicle;  // a[k][n]
  ResourceGrid aggregate;                     // A[k][m]
};

// Log-distance path loss (128.1 + 37.6*log10(d/km) dB) with optional
// log-normal shadowing; distance clamped to >= 1 m.
double channel_gain(Point vehicle, Point station, double shadowing_sigma_db, Rng& rng);

// Poisson(lambda_j) vehicles per region, uniform positions within the region,
// nearest-station association. Gains are not filled here.
std::vector<Vehicle> spawn_vehicles(const DensityMap& density, const Topology& topo, Rng& rng);

void assign_channel_gains(std::vector<Vehicle>& vehicles, const Topology& topo,
                          double shadowing_sigma_db, double tx_power_dbm, Rng& rng);

Arrivals sample_arrivals(const std::vector<Vehicle>& vehicles,
                         const std::vector<SliceSpec>& slices, int num_stations, Rng& rng);

SlotObservation sample_slot(int slot, const DensityMap& density, const Topology& topo,
                            const std::vector<SliceSpec>& slices, double shadowing_sigma_db,
                            double tx_power_dbm, Rng& rng);

// T consecutive slots drawn from one window's density.
std::vector<SlotObservation> sample_window(const DensityMap& density, const Topology& topo,
                                           const std::vector<SliceSpec>& slices,
                                           double shadowing_sigma_db, double tx_power_dbm,
                                           int slots, Rng& rng);

}  // namespace slicesim
