#pragma once

#include <string>
#include <vector>

#include "srm/characteristics.hpp"
#include "srm/dynamic_sim.hpp"

namespace srm {

struct PerformanceMetrics {
  double t_mean = 0, t_peak = 0, t_min = 0;
  double ripple_pct = 0;
  double i_rms = 0;
  double p_d = 0, p_cu = 0, p_core = 0, p_total_loss = 0, p_in = 0;
  double efficiency_pct = 0;
  double torque_density = 0;  // N*m/L
  double torque_per_amp = 0;
  double power_per_amp = 0;
  double speed_rpm = 0;
};

inline constexpr int kPhases = 2;

double mechanical_speed_rad(double rpm);

// Derived quantities from mean torque, RMS phase current and losses.
PerformanceMetrics derive_metrics(double t_mean, double i_rms, double p_cu, double p_core, double volume,
                                  double speed_rpm);

PerformanceMetrics compute_metrics(const SimulationTrace& trace, const MotorSpec& spec);

// Identity checks of a metrics record; returns the largest relative deviation.
double metrics_identity_error(const PerformanceMetrics& m, double volume);

struct StaticSummary {
  double mean = 0.0;
  double peak = 0.0;
};

StaticSummary static_summary(const TorqueAngleCurve& curve, const CommutationAngles& window);
// Window taken from the curve's own main positive lobe; zero curve gives (0, 0).
StaticSummary static_summary(const TorqueAngleCurve& curve);

double percent_increase(double base, double other);
double prediction_error(double predicted, double measured);

// Rounds toward zero at `decimals`, the way the printed performance tables
// carry intermediate values.
double truncate_to(double value, int decimals);

struct TableRow {
  double p_d, p_in, torque_density, torque_per_amp, power_per_amp, efficiency_pct;
};

// Chained table arithmetic: P_d is carried at 0.01 W before the per-ampere
// power and the efficiency are formed from it.
TableRow reconstruct_table_row(double t_mean, double i_rms, double total_loss, double volume, double speed_rpm);

struct ReportEntry {
  std::string label;
  PerformanceMetrics metrics;
  double pm_volume_l = 0.0;  // litres of magnet, 0 when none
};

struct ComparisonReport {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string csv;
  std::string text;
};

ComparisonReport comparison_report(const std::vector<ReportEntry>& entries, size_t baseline = 0);

double pm_volume_litres(const MotorSpec& spec);

std::string format_sig(double v, int digits = 4);
std::string metrics_to_json(const PerformanceMetrics& m);

}  // namespace srm
