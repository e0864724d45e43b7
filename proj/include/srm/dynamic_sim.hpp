#pragma once

#include <string>
#include <vector>

#include "srm/characteristics.hpp"
#include "srm/drive_control.hpp"

namespace srm {

struct MapGrid {
  double theta_step = 0.1;    // mech deg
  double current_step = 0.1;  // A
  double i_max = 8.0;         // A
};

// Phase-A flux linkage and torque over one rotor pitch; phase B reads the same
// tables half a pitch later.
struct MagneticMaps {
  MapGrid grid;
  int n_theta = 0;    // periodic cells over one pitch
  int n_current = 0;  // nodes from 0 to i_max
  double pitch = 20.0;
  std::vector<double> lambda;  // [t * n_current + c], Wb-turns
  std::vector<double> torque;  // N*m
  std::string spec_hash;
  Mode mode = Mode::Saturable;
  TorqueOptions torque_options;

  double lambda_at(double theta, double current) const;
  double torque_at(double theta, double current) const;
  double dlambda_dtheta(double theta, double current) const;  // per mech rad
  double dlambda_di(double theta, double current) const;      // H
  double node_lambda(int t, int c) const { return lambda[static_cast<size_t>(t) * n_current + c]; }
  double node_torque(int t, int c) const { return torque[static_cast<size_t>(t) * n_current + c]; }

 private:
  double interpolate(const std::vector<double>& table, double theta, double current) const;
};

// Torque rows integrate lambda over the map's own current nodes, which are
// the quadrature nodes static_torque uses for currents on the grid.
MagneticMaps precompute_maps(const MotorSpec& spec, Mode mode, const MapGrid& grid = {},
                             const TorqueOptions& opt = {}, int threads = 1);

struct SimulationTrace {
  std::vector<double> time;   // s
  std::vector<double> theta;  // mech deg, unwrapped
  std::vector<double> i_a, i_b;
  std::vector<double> v_a, v_b;
  std::vector<unsigned char> s_a, s_b, c_a, c_b, g_a, g_b;
  std::vector<double> t_a, t_b, t_total;
  double speed_rpm = 0.0;
  double dt = 0.0;
  double pitch = 20.0;
  double theta0 = 0.0;
  bool inductance_floor_hit = false;

  size_t size() const { return time.size(); }
  SimulationTrace slice(size_t begin, size_t end) const;
};

struct SimulationOptions {
  double theta0 = 0.0;            // mech deg at t = 0
  bool check_band = true;
  double inductance_floor = 1e-4; // H
};

SimulationTrace simulate(const MotorSpec& spec, const MagneticMaps& maps, const DriveConfig& drive,
                         double speed_rpm, double t_end, double dt, const SimulationOptions& opt = {});

inline constexpr int kSettlingCycles = 3;

// Trailing n_cycles electrical cycles, cut at cycle boundaries.
SimulationTrace steady_state_window(const SimulationTrace& trace, int n_cycles, int settling = kSettlingCycles);

// Sample indices where a new electrical cycle starts.
std::vector<size_t> cycle_boundaries(const SimulationTrace& trace);

std::string trace_csv_header();
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);
SimulationTrace read_trace_csv(std::istream& in, double speed_rpm, double pitch);

}  // namespace srm
