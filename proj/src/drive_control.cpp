#include "srm/drive_control.hpp"

#include <cmath>

#include "json.hpp"
#include "srm/error.hpp"

namespace srm {

namespace {

double wrap(double x, double period) { return x - period * std::floor(x / period); }

bool in_window(double theta, double start, double width, double period) {
  return wrap(theta - start, period) < width;
}

}  // namespace

void validate(const DriveConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw ConfigError("drive: delta must be positive");
  if (!(cfg.v_dc >= 0.0)) throw ConfigError("drive: V_dc must be non-negative");
  if (!(cfg.i_ref > cfg.delta)) throw ConfigError("drive: i_ref must exceed delta");
  if (cfg.rotor_teeth <= 0) throw ConfigError("drive: rotor teeth must be positive");
  if (cfg.device_drop < 0.0) throw ConfigError("drive: device drop must be non-negative");
  if (cfg.encoder_step < 0.0) throw ConfigError("drive: encoder step must be non-negative");
  const auto [start, width] = conduction_window(cfg);
  if (!(width > 0.0) || !(width < cfg.pitch())) throw ConfigError("drive: conduction width outside (0, pitch)");
  (void)start;
}

bool hysteresis_step(double i_meas, const DriveConfig& cfg, bool prev_s) {
  if (i_meas < cfg.i_ref - cfg.delta) return true;
  if (i_meas > cfg.i_ref + cfg.delta) return false;
  return prev_s;
}

bool gate(bool s, bool c) { return s && c; }

std::pair<double, double> conduction_window(const DriveConfig& cfg) {
  const double half = 0.5 * cfg.pitch();
  const CommutationAngles& ca = cfg.commutation;
  if (cfg.mode == CommutationMode::Conventional) return {wrap(ca.nominal_aligned - half, cfg.pitch()), half};
  return {wrap(ca.unaligned_angle, cfg.pitch()), ca.theta_on};
}

std::pair<bool, bool> commutation_signals(double theta, const DriveConfig& cfg) {
  const double p = cfg.pitch();
  double th = theta;
  if (cfg.encoder_step > 0.0) th = std::floor(th / cfg.encoder_step) * cfg.encoder_step;
  const auto [start, width] = conduction_window(cfg);
  return {in_window(th, start, width, p), in_window(th, start + 0.5 * p, width, p)};
}

double inverter_voltage(bool g, double current, const DriveConfig& cfg) {
  if (g) return cfg.v_dc - cfg.device_drop;
  if (current > 0.0) return -cfg.v_dc - cfg.device_drop;
  return 0.0;
}

double inverter_voltage(bool g, bool c, double current, const DriveConfig& cfg) {
  if (cfg.chopping == Chopping::Soft && !g && c && current > 0.0) return -cfg.device_drop;
  return inverter_voltage(g, current, cfg);
}

Controller::Controller(DriveConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

const GateState& Controller::step(double theta, double i_a, double i_b) {
  const auto [c_a, c_b] = commutation_signals(theta, cfg_);
  state_.s_a = hysteresis_step(i_a, cfg_, state_.s_a);
  state_.s_b = hysteresis_step(i_b, cfg_, state_.s_b);
  state_.c_a = c_a;
  state_.c_b = c_b;
  state_.g_a = gate(state_.s_a, c_a);
  state_.g_b = gate(state_.s_b, c_b);
  return state_;
}

std::vector<CommutationEntry> commutation_table(const DriveConfig& cfg) {
  const double p = cfg.pitch();
  const auto [start, width] = conduction_window(cfg);
  return {{"A", start, wrap(start + width, p)},
          {"B", wrap(start + 0.5 * p, p), wrap(start + 0.5 * p + width, p)}};
}

std::string commutation_table_json(const DriveConfig& cfg) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : commutation_table(cfg))
    j.push_back({{"phase", e.phase}, {"on_angle_mech", e.on_angle}, {"off_angle_mech", e.off_angle}});
  return j.dump(2);
}

}  // namespace srm
