#include "slicesim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace slicesim {

void DensityPattern::validate(int num_regions) const {
  if (period_windows <= 0)
    throw std::invalid_argument("density pattern: period must be > 0");
  const auto check = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != num_regions)
      throw std::invalid_argument(std::string("density pattern: ") + name +
                                  " must have one entry per region");
  };
  check(base, "base");
  check(amplitude, "amplitude");
  check(phase, "phase");
  if (noise_std < 0) throw std::invalid_argument("density pattern: noise_std must be >= 0");
}

DensityMap gen_density(int window, const DensityPattern& pattern, Rng& rng) {
  const int j_count = static_cast<int>(pattern.base.size());
  pattern.validate(j_count);
  DensityMap out;
  out.window = window;
  out.mean_vehicles.resize(j_count);
  std::normal_distribution<double> noise(0.0, pattern.noise_std > 0 ? pattern.noise_std : 1.0);
  for (int j = 0; j < j_count; ++j) {
    const double seasonal =
        pattern.amplitude[j] *
        std::sin(2.0 * std::numbers::pi * window / pattern.period_windows + pattern.phase[j]);
    double v = pattern.base[j] + seasonal;
    if (pattern.noise_std > 0) v += noise(rng);
    out.mean_vehicles[j] = std::max(0.0, v);
  }
  return out;
}

std::vector<DensityMap> load_trace(const std::string& path, int num_regions) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: empty file");
  // tolerate trailing CR from CRLF files
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "window,region,density")
    throw std::runtime_error("trace: expected header 'window,region,density'");

  std::map<long, std::vector<std::pair<int, double>>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f0, f1, f2;
    if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2))
      throw std::runtime_error("trace: malformed row at line " + std::to_string(line_no));
    long window;
    int region;
    double density;
    try {
      size_t p0, p1, p2;
      window = std::stol(f0, &p0);
      region = std::stoi(f1, &p1);
      density = std::stod(f2, &p2);
      if (p0 != f0.size() || p1 != f1.size() || p2 != f2.size())
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("trace: malformed row at line " + std::to_string(line_no));
    }
    if (region < 0 || region >= num_regions)
      throw std::runtime_error("trace: region index out of range at line " + std::to_string(line_no));
    if (density < 0)
      throw std::runtime_error("trace: negative density at line " + std::to_string(line_no));
    rows[window].push_back({region, density});
  }
  if (rows.empty()) throw std::runtime_error("trace: no data rows");

  const long first = rows.begin()->first;
  const long last = rows.rbegin()->first;
  if (last - first + 1 != static_cast<long>(rows.size()))
    throw std::runtime_error("trace: window indices must be contiguous");

  std::vector<DensityMap> out;
  out.reserve(rows.size());
  for (auto& [w, cells] : rows) {
    DensityMap d;
    d.window = static_cast<int>(w - first);
    d.mean_vehicles.assign(num_regions, -1.0);
    for (auto [region, density] : cells) {
      if (d.mean_vehicles[region] >= 0)
        throw std::runtime_error("trace: duplicate cell for window " + std::to_string(w));
      d.mean_vehicles[region] = density;
    }
    for (int j = 0; j < num_regions; ++j)
      if (d.mean_vehicles[j] < 0)
        throw std::runtime_error("trace: incomplete window " + std::to_string(w));
    out.push_back(std::move(d));
  }
  return out;
}

double channel_gain(Point vehicle, Point station, double shadowing_sigma_db, Rng& rng) {
  const double d_m = std::max(1.0, distance(vehicle, station));
  double pl_db = 128.1 + 37.6 * std::log10(d_m / 1000.0);
  if (shadowing_sigma_db > 0) {
    std::normal_distribution<double> shadow(0.0, shadowing_sigma_db);
    pl_db += shadow(rng);
  }
  return std::pow(10.0, -pl_db / 10.0);
}

std::vector<Vehicle> spawn_vehicles(const DensityMap& density, const Topology& topo, Rng& rng) {
  if (static_cast<int>(density.mean_vehicles.size()) != topo.num_regions())
    throw std::invalid_argument("spawn_vehicles: density does not match region count");
  std::vector<Vehicle> vehicles;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int next_id = 0;
  for (int j = 0; j < topo.num_regions(); ++j) {
    const double lambda = density.mean_vehicles[j];
    int count = 0;
    if (lambda > 0) {
      std::poisson_distribution<int> pois(lambda);
      count = pois(rng);
    }
    const Rect r = topo.region_rect(j);
    for (int i = 0; i < count; ++i) {
      Vehicle v;
      v.id = next_id++;
      v.position = Point{r.x0 + unit(rng) * (r.x1 - r.x0), r.y0 + unit(rng) * (r.y1 - r.y0)};
      v.associated_bs = topo.nearest_station(v.position);
      vehicles.push_back(std::move(v));
    }
  }
  return vehicles;
}

void assign_channel_gains(std::vector<Vehicle>& vehicles, const Topology& topo,
                          double shadowing_sigma_db, double tx_power_dbm, Rng& rng) {
  for (auto& v : vehicles) {
    v.tx_power_dbm = tx_power_dbm;
    v.gain.resize(topo.num_stations());
    for (int m = 0; m < topo.num_stations(); ++m)
      v.gain[m] = channel_gain(v.position, topo.stations[m].position, shadowing_sigma_db, rng);
  }
}

Arrivals sample_arrivals(const std::vector<Vehicle>& vehicles,
                         const std::vector<SliceSpec>& slices, int num_stations, Rng& rng) {
  const int num_slices = static_cast<int>(slices.size());
  Arrivals out;
  out.per_vehicle.assign(num_slices, std::vector<int>(vehicles.size(), 0));
  out.aggregate = ResourceGrid(num_slices, num_stations);
  for (int k = 0; k < num_slices; ++k) {
    const double lambda = slices[k].arrival_rate;
    if (lambda < 0) throw std::invalid_argument("sample_arrivals: arrival_rate must be >= 0");
    if (lambda == 0) continue;
    std::poisson_distribution<int> pois(lambda);
    for (size_t n = 0; n < vehicles.size(); ++n) {
      const int a = pois(rng);
      out.per_vehicle[k][n] = a;
      out.aggregate.at(k, vehicles[n].associated_bs) += a;
    }
  }
  return out;
}

SlotObservation sample_slot(int slot, const DensityMap& density, const Topology& topo,
                            const std::vector<SliceSpec>& slices, double shadowing_sigma_db,
                            double tx_power_dbm, Rng& rng) {
  SlotObservation obs;
  obs.slot = slot;
  obs.vehicles = spawn_vehicles(density, topo, rng);
  assign_channel_gains(obs.vehicles, topo, shadowing_sigma_db, tx_power_dbm, rng);
  obs.by_station.assign(topo.num_stations(), {});
  for (size_t n = 0; n < obs.vehicles.size(); ++n)
    obs.by_station[obs.vehicles[n].associated_bs].push_back(static_cast<int>(n));
  Arrivals a = sample_arrivals(obs.vehicles, slices, topo.num_stations(), rng);
  obs.arrivals = std::move(a.per_vehicle);
  obs.aggregate = std::move(a.aggregate);
  return obs;
}

std::vector<SlotObservation> sample_window(const DensityMap& density, const Topology& topo,
                                           const std::vector<SliceSpec>& slices,
                                           double shadowing_sigma_db, double tx_power_dbm,
                                           int slots, Rng& rng) {
  if (slots < 1) throw std::invalid_argument("sample_window: slots must be >= 1");
  std::vector<SlotObservation> out;
  out.reserve(slots);
  for (int t = 0; t < slots; ++t)
    out.push_back(sample_slot(t, density, topo, slices, shadowing_sigma_db, tx_power_dbm, rng));
  return out;
}

}  // namespace slicesim
