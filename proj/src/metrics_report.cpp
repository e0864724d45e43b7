#include "srm/metrics_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "srm/error.hpp"

namespace srm {

double mechanical_speed_rad(double rpm) { return rpm * 2.0 * kPi / 60.0; }

PerformanceMetrics derive_metrics(double t_mean, double i_rms, double p_cu, double p_core, double volume,
                                  double speed_rpm) {
  if (!(t_mean > 0.0)) throw NumericalError("no net positive torque");
  if (!(volume > 0.0)) throw ConfigError("active volume must be positive");
  PerformanceMetrics m;
  m.t_mean = t_mean;
  m.i_rms = i_rms;
  m.speed_rpm = speed_rpm;
  m.p_d = t_mean * mechanical_speed_rad(speed_rpm);
  m.p_cu = p_cu;
  m.p_core = p_core;
  m.p_total_loss = p_cu + p_core;
  m.p_in = m.p_d + m.p_total_loss;
  m.efficiency_pct = 100.0 * m.p_d / m.p_in;
  m.torque_density = t_mean / volume;
  m.torque_per_amp = i_rms > 0.0 ? t_mean / i_rms : 0.0;
  m.power_per_amp = i_rms > 0.0 ? m.p_d / i_rms : 0.0;
  return m;
}

PerformanceMetrics compute_metrics(const SimulationTrace& trace, const MotorSpec& spec) {
  const size_t n = trace.size();
  if (n == 0) throw ConfigError("empty trace");
  double sum_t = 0.0, sum_a = 0.0, sum_b = 0.0;
  double t_max = trace.t_total.front(), t_min = trace.t_total.front();
  for (size_t k = 0; k < n; ++k) {
    sum_t += trace.t_total[k];
    sum_a += trace.i_a[k] * trace.i_a[k];
    sum_b += trace.i_b[k] * trace.i_b[k];
    t_max = std::max(t_max, trace.t_total[k]);
    t_min = std::min(t_min, trace.t_total[k]);
  }
  const double t_mean = sum_t / n;
  if (!(t_mean > 0.0)) throw NumericalError("no net positive torque");
  // Phases are symmetric; report the per-phase RMS as the mean of both.
  const double i_rms = 0.5 * (std::sqrt(sum_a / n) + std::sqrt(sum_b / n));
  PerformanceMetrics m = derive_metrics(t_mean, i_rms, kPhases * i_rms * i_rms * spec.phase_resistance,
                                        spec.core_loss, spec.active_volume, trace.speed_rpm);
  m.t_peak = t_max;
  m.t_min = t_min;
  m.ripple_pct = 100.0 * (t_max - t_min) / t_mean;
  return m;
}

double metrics_identity_error(const PerformanceMetrics& m, double volume) {
  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
  };
  double e = 0.0;
  e = std::max(e, rel(m.p_in, m.p_d + m.p_cu + m.p_core));
  e = std::max(e, rel(m.p_total_loss, m.p_cu + m.p_core));
  e = std::max(e, rel(m.efficiency_pct, 100.0 * m.p_d / m.p_in));
  e = std::max(e, rel(m.torque_density, m.t_mean / volume));
  e = std::max(e, rel(m.p_d, m.t_mean * mechanical_speed_rad(m.speed_rpm)));
  if (m.i_rms > 0.0) {
    e = std::max(e, rel(m.torque_per_amp, m.t_mean / m.i_rms));
    e = std::max(e, rel(m.power_per_amp, m.p_d / m.i_rms));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Static summaries

StaticSummary static_summary(const TorqueAngleCurve& curve, const CommutationAngles& window) {
  const double period = curve.period();
  const double a = window.unaligned_angle;
  double width = window.aligned_angle - window.unaligned_angle;
  width -= period * std::floor(width / period);
  if (!(width > 0.0)) throw ConfigError("empty conduction window");
  const double b = a + width;

  // Exact integral of the piecewise-linear curve: breakpoints are the grid nodes.
  std::vector<double> xs{a};
  const double step = curve.grid_step;
  for (double x = (std::floor(a / step) + 1.0) * step; x < b; x += step) xs.push_back(x);
  xs.push_back(b);
  double area = 0.0;
  double peak = curve.at(xs.front());
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    const double y0 = curve.at(xs[k]), y1 = curve.at(xs[k + 1]);
    area += 0.5 * (y0 + y1) * (xs[k + 1] - xs[k]);
    peak = std::max(peak, y1);
  }
  return {area / width, peak};
}

StaticSummary static_summary(const TorqueAngleCurve& curve) {
  if (curve.peak() == 0.0) return {0.0, 0.0};
  const auto [rise, fall] = main_positive_lobe(curve);
  CommutationAngles w;
  w.unaligned_angle = rise;
  w.aligned_angle = fall;
  return static_summary(curve, w);
}

// ---------------------------------------------------------------------------
// Table arithmetic

double percent_increase(double base, double other) {
  if (!(base > 0.0)) throw ConfigError("percent increase needs a positive base");
  return 100.0 * (other - base) / base;
}

double prediction_error(double predicted, double measured) {
  if (!(predicted > 0.0)) throw ConfigError("prediction error needs a positive prediction");
  return 100.0 * std::abs(predicted - measured) / predicted;
}

double truncate_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The small nudge keeps values such as 22.80 (stored as 22.7999...) intact.
  return std::trunc(value * scale + (value >= 0 ? 1e-9 : -1e-9)) / scale;
}

TableRow reconstruct_table_row(double t_mean, double i_rms, double total_loss, double volume, double speed_rpm) {
  TableRow r;
  r.p_d = truncate_to(t_mean * mechanical_speed_rad(speed_rpm), 2);
  r.p_in = r.p_d + total_loss;
  r.torque_density = t_mean / volume;
  r.torque_per_amp = t_mean / i_rms;
  r.power_per_amp = r.p_d / i_rms;
  r.efficiency_pct = 100.0 * r.p_d / r.p_in;
  return r;
}

double pm_volume_litres(const MotorSpec& spec) {
  // One set-1 magnet per C-core and one set-2 magnet between each pair of neighbouring C-cores.
  const double face = spec.pm_width * spec.stack_length;  // mm^2
  double mm3 = 0.0;
  if (spec.has_pm1()) mm3 += spec.ccores * face * spec.pm1_length;
  if (spec.has_pm2()) mm3 += spec.ccores * face * spec.pm2_length;
  return mm3 * 1e-6;
}

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ComparisonReport comparison_report(const std::vector<ReportEntry>& entries, size_t baseline) {
  if (entries.size() < 2) throw ConfigError("comparison report needs at least two entries");
  if (baseline >= entries.size()) throw ConfigError("baseline index out of range");
  const PerformanceMetrics& base = entries[baseline].metrics;

  ComparisonReport rep;
  rep.columns = {"label",          "T_mean",         "T_peak",        "ripple_pct",      "I_rms",
                 "P_d",            "P_cu",           "P_core",        "P_total_loss",    "P_in",
                 "efficiency_pct", "torque_density", "torque_per_amp", "power_per_amp",  "speed_rpm",
                 "torque_per_pm_volume", "inc_T_mean_pct", "inc_P_d_pct", "inc_efficiency_pct",
                 "inc_torque_density_pct", "inc_torque_per_amp_pct", "inc_power_per_amp_pct", "speed_warning"};
  for (const auto& e : entries) {
    const auto& m = e.metrics;
    std::vector<std::string> row{e.label};
    for (double v : {m.t_mean, m.t_peak, m.ripple_pct, m.i_rms, m.p_d, m.p_cu, m.p_core, m.p_total_loss, m.p_in,
                     m.efficiency_pct, m.torque_density, m.torque_per_amp, m.power_per_amp, m.speed_rpm})
      row.push_back(format_sig(v));
    row.push_back(e.pm_volume_l > 0.0 ? format_sig(m.t_mean / e.pm_volume_l) : "");
    for (auto [b, o] : {std::pair{base.t_mean, m.t_mean}, std::pair{base.p_d, m.p_d},
                        std::pair{base.efficiency_pct, m.efficiency_pct},
                        std::pair{base.torque_density, m.torque_density},
                        std::pair{base.torque_per_amp, m.torque_per_amp},
                        std::pair{base.power_per_amp, m.power_per_amp}})
      row.push_back(b > 0.0 ? format_sig(percent_increase(b, o)) : "");
    row.push_back(m.speed_rpm != base.speed_rpm ? "speed differs from baseline" : "");
    rep.rows.push_back(std::move(row));
  }

  std::ostringstream csv;
  for (size_t c = 0; c < rep.columns.size(); ++c) csv << (c ? "," : "") << rep.columns[c];
  csv << '\n';
  for (const auto& row : rep.rows) {
    for (size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
    csv << '\n';
  }
  rep.csv = csv.str();

  // Transposed text table: one line per quantity, one column per entry.
  std::vector<size_t> width(entries.size() + 1, 0);
  for (const auto& c : rep.columns) width[0] = std::max(width[0], c.size());
  for (size_t e = 0; e < entries.size(); ++e)
    for (const auto& cell : rep.rows[e]) width[e + 1] = std::max(width[e + 1], cell.size());
  std::ostringstream txt;
  for (size_t c = 0; c < rep.columns.size(); ++c) {
    txt << rep.columns[c] << std::string(width[0] - rep.columns[c].size() + 2, ' ');
    for (size_t e = 0; e < entries.size(); ++e) {
      const auto& cell = rep.rows[e][c];
      txt << std::string(width[e + 1] - cell.size(), ' ') << cell << (e + 1 < entries.size() ? "  " : "");
    }
    txt << '\n';
  }
  rep.text = txt.str();
  return rep;
}

std::string metrics_to_json(const PerformanceMetrics& m) {
  nlohmann::json j = {{"T_mean", m.t_mean},
                      {"T_peak", m.t_peak},
                      {"T_min", m.t_min},
                      {"ripple_pct", m.ripple_pct},
                      {"I_rms", m.i_rms},
                      {"P_d", m.p_d},
                      {"P_cu", m.p_cu},
                      {"P_core", m.p_core},
                      {"P_total_loss", m.p_total_loss},
                      {"P_in", m.p_in},
                      {"efficiency_pct", m.efficiency_pct},
                      {"torque_density", m.torque_density},
                      {"torque_per_amp", m.torque_per_amp},
                      {"power_per_amp", m.power_per_amp},
                      {"speed", m.speed_rpm}};
  return j.dump(2);
}

}  // namespace srm
