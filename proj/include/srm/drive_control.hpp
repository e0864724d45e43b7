#pragma once

#include <string>
#include <vector>

#include "srm/characteristics.hpp"

namespace srm {

enum class Chopping { Hard, Soft };
// Proposed: windows from the extracted alpha/beta. Conventional: half-pitch
// windows between the geometric unaligned and aligned positions.
enum class CommutationMode { Proposed, Conventional };

struct DriveConfig {
  double i_ref = 6.0;   // A
  double delta = 0.2;   // A, band half-width
  double v_dc = 150.0;  // V
  CommutationAngles commutation;
  int rotor_teeth = 18;
  double device_drop = 0.0;  // V
  Chopping chopping = Chopping::Hard;
  CommutationMode mode = CommutationMode::Proposed;
  double encoder_step = 0.0;  // mech deg; 0 keeps position continuous

  double pitch() const { return 360.0 / rotor_teeth; }
};

void validate(const DriveConfig& cfg);

struct GateState {
  bool s_a = false, s_b = false;
  bool c_a = false, c_b = false;
  bool g_a = false, g_b = false;
};

bool hysteresis_step(double i_meas, const DriveConfig& cfg, bool prev_s);
bool gate(bool s, bool c);

// Conduction window of phase A as (start, width) in mech deg.
std::pair<double, double> conduction_window(const DriveConfig& cfg);
std::pair<bool, bool> commutation_signals(double theta, const DriveConfig& cfg);

double inverter_voltage(bool g, double current, const DriveConfig& cfg);
// Soft chopping needs the commutation bit to tell chopping-off from turn-off.
double inverter_voltage(bool g, bool c, double current, const DriveConfig& cfg);

// Single-owner controller: hysteresis memory plus the last emitted state.
class Controller {
 public:
  explicit Controller(DriveConfig cfg);
  const GateState& step(double theta, double i_a, double i_b);
  const GateState& state() const { return state_; }
  const DriveConfig& config() const { return cfg_; }

 private:
  DriveConfig cfg_;
  GateState state_;
};

struct CommutationEntry {
  std::string phase;
  double on_angle;   // mech deg
  double off_angle;  // mech deg
};

std::vector<CommutationEntry> commutation_table(const DriveConfig& cfg);
std::string commutation_table_json(const DriveConfig& cfg);

}  // namespace srm
