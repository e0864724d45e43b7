#include "srm/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srm/error.hpp"
#include "srm/parallel.hpp"

namespace srm {

namespace {

double wrap(double x, double period) { return x - period * std::floor(x / period); }

// Reduce into (-period/2, period/2].
double centred(double x, double period) {
  double r = wrap(x, period);
  if (r > 0.5 * period) r -= period;
  return r;
}

}  // namespace

double coenergy(const MotorSpec& spec, double theta, double current, Mode mode, int steps, Phase phase) {
  if (current < 0.0) throw ConfigError("current must be non-negative");
  if (steps < 1) throw ConfigError("co-energy needs at least one current step");
  if (current == 0.0) return 0.0;
  const double h = current / steps;
  double sum = 0.0;
  std::vector<double> guess;
  for (int j = 0; j <= steps; ++j) {
    const auto r = flux_linkage_detail(spec, theta, h * j, phase, mode, guess.empty() ? nullptr : &guess);
    guess = r.solution.potentials;
    sum += (j == 0 || j == steps) ? 0.5 * r.lambda : r.lambda;
  }
  return sum * h;
}

double magnet_coenergy(const MotorSpec& spec, double theta, Mode mode, int steps, Phase phase) {
  if (!spec.has_pm1() && !spec.has_pm2()) return 0.0;
  if (steps < 1) throw ConfigError("magnet co-energy needs at least one step");
  // Ramp every magnet together from zero: W' = sum F_k * integral phi_k ds.
  const double f1 = spec.has_pm1() ? magnet_source(spec, spec.pm1_length).mmf : 0.0;
  const double f2 = spec.has_pm2() ? 2.0 * magnet_source(spec, spec.pm2_length).mmf : 0.0;
  double sum = 0.0;
  std::vector<double> guess;
  for (int j = 1; j <= steps; ++j) {
    const double s = static_cast<double>(j) / steps;
    const auto r = flux_linkage_detail(spec, theta, 0.0, phase, mode, guess.empty() ? nullptr : &guess, s);
    guess = r.solution.potentials;
    const double v = f1 * r.solution.phi_pm1 + f2 * r.solution.phi_pm2;
    sum += j == steps ? 0.5 * v : v;
  }
  return (spec.ccores / 2) * sum / steps;
}

double static_torque(const MotorSpec& spec, double theta, double current, Mode mode, const TorqueOptions& opt) {
  if (current < 0.0) throw ConfigError("current must be non-negative");
  const double d = opt.delta_deg;
  double wp = coenergy(spec, theta + d, current, mode, opt.current_steps);
  double wm = coenergy(spec, theta - d, current, mode, opt.current_steps);
  if (opt.magnet_coenergy) {
    wp += magnet_coenergy(spec, theta + d, mode, opt.magnet_steps);
    wm += magnet_coenergy(spec, theta - d, mode, opt.magnet_steps);
  }
  return (wp - wm) / (2.0 * deg2rad(d));
}

double analytic_torque_linear(const MotorSpec& spec, double current) {
  // A C-core loop links two coils, so the loop MMF is 2 * N_pole * i.
  const double loop_turns = 2.0 * spec.turns_per_pole;
  const double per_loop = spec.teeth_per_pole * loop_turns * loop_turns * kMu0 * bore_diameter(spec) * 1e-3 *
                          spec.stack_length * 1e-3 * current * current / (8.0 * spec.airgap * 1e-3);
  return (spec.ccores / 2) * per_loop;
}

double TorqueAngleCurve::peak() const {
  double p = 0.0;
  for (double t : torque) p = std::max(p, std::abs(t));
  return p;
}

double TorqueAngleCurve::at(double theta) const {
  const double x = wrap(theta - angles.front(), period());
  const double pos = x / grid_step;
  size_t k = static_cast<size_t>(std::floor(pos));
  if (k >= angles.size() - 1) k = angles.size() - 2;
  const double f = pos - static_cast<double>(k);
  return torque[k] + f * (torque[k + 1] - torque[k]);
}

std::vector<TorqueAngleCurve> torque_angle_curve(const MotorSpec& spec, const std::vector<double>& currents,
                                                 Mode mode, double grid_step, const TorqueOptions& opt,
                                                 int threads) {
  const double pitch = spec.rotor_pitch();
  const double cells = pitch / grid_step;
  const int n = static_cast<int>(std::lround(cells));
  if (!(grid_step > 0.0) || n < 4 || std::abs(cells - n) > 1e-9 * cells)
    throw ConfigError("grid step must divide the rotor pitch");
  for (double i : currents)
    if (i < 0.0) throw ConfigError("currents must be non-negative");

  const std::string hash = spec_hash(spec);
  const int nc = static_cast<int>(currents.size());
  // One task per (angle, current): two co-energy sweeps.
  std::vector<double> values(static_cast<size_t>(n + 1) * nc);
  parallel_for((n + 1) * nc, threads, [&](int task) {
    const int k = task / nc;
    const int c = task % nc;
    const double theta = k * grid_step;
    values[task] = static_torque(spec, theta, currents[c], mode, opt);
  });

  std::vector<TorqueAngleCurve> out;
  for (int c = 0; c < nc; ++c) {
    TorqueAngleCurve curve;
    curve.current = currents[c];
    curve.topology = spec.topology;
    curve.mode = mode;
    curve.grid_step = grid_step;
    curve.delta_deg = opt.delta_deg;
    curve.current_steps = opt.current_steps;
    curve.spec_hash = hash;
    for (int k = 0; k <= n; ++k) {
      curve.angles.push_back(k * grid_step);
      curve.torque.push_back(values[static_cast<size_t>(k) * nc + c]);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

double net_work(const TorqueAngleCurve& curve) {
  double w = 0.0;
  for (size_t k = 0; k + 1 < curve.angles.size(); ++k)
    w += 0.5 * (curve.torque[k] + curve.torque[k + 1]) * deg2rad(curve.angles[k + 1] - curve.angles[k]);
  return w;
}

CommutationAngles commutation_from_alpha_beta(double alpha, double beta, double pitch) {
  CommutationAngles c;
  c.alpha = alpha;
  c.beta = beta;
  c.pitch = pitch;
  c.theta_on = 0.5 * pitch + alpha - beta;
  c.theta_off = pitch - c.theta_on;
  c.self_starting = alpha > beta;
  if (!(alpha > 0.0)) c.warnings.push_back("not self-starting");
  return c;
}

ZeroCrossings find_zero_crossings(const TorqueAngleCurve& curve, double threshold_fraction) {
  const size_t n = curve.angles.size() - 1;  // last point repeats the first
  const double eps = threshold_fraction * curve.peak();
  const double period = curve.period();
  ZeroCrossings zc;
  if (curve.peak() == 0.0) return zc;

  std::vector<size_t> idx;
  for (size_t k = 0; k < n; ++k)
    if (std::abs(curve.torque[k]) > eps) idx.push_back(k);
  if (idx.size() < 2) return zc;

  for (size_t m = 0; m < idx.size(); ++m) {
    const size_t p = idx[m];
    const size_t q = idx[(m + 1) % idx.size()];
    const double tp = curve.torque[p], tq = curve.torque[q];
    if ((tp > 0) == (tq > 0)) continue;
    double ap = curve.angles[p], aq = curve.angles[q];
    if (aq <= ap) aq += period;
    const double x = wrap(ap + (aq - ap) * tp / (tp - tq), period) + curve.angles.front();
    (tp > 0 ? zc.down : zc.up).push_back(x);
  }
  std::sort(zc.down.begin(), zc.down.end());
  std::sort(zc.up.begin(), zc.up.end());
  return zc;
}

std::pair<double, double> main_positive_lobe(const TorqueAngleCurve& curve, double threshold_fraction) {
  const ZeroCrossings zc = find_zero_crossings(curve, threshold_fraction);
  if (zc.down.empty() || zc.up.empty()) throw NumericalError("curve has no zero crossing");
  const double period = curve.period();
  double best_area = -1.0;
  std::pair<double, double> best{0, 0};
  for (double rise : zc.up) {
    // The lobe ends at the first fall after the rise.
    double fall = 0.0, gap = period + 1.0;
    for (double d : zc.down) {
      const double g = wrap(d - rise, period);
      if (g > 0.0 && g < gap) {
        gap = g;
        fall = d;
      }
    }
    double area = 0.0;
    const int samples = 200;
    for (int s = 0; s < samples; ++s) area += std::max(0.0, curve.at(rise + gap * (s + 0.5) / samples));
    area *= gap / samples;
    if (area > best_area) {
      best_area = area;
      best = {rise, fall};
    }
  }
  return best;
}

CommutationAngles extract_commutation_angles(const TorqueAngleCurve& curve, double phase_shift,
                                             std::optional<double> nominal_aligned) {
  const double period = curve.period();
  const auto [rise, fall] = main_positive_lobe(curve);
  const double next_rise = rise + phase_shift;
  const double alpha = centred(fall - next_rise, period);
  const double nominal = nominal_aligned.value_or(curve.angles.front());
  const double beta = centred(nominal - fall, period);

  CommutationAngles c = commutation_from_alpha_beta(alpha, beta, period);
  c.aligned_angle = wrap(fall, period);
  c.unaligned_angle = wrap(rise, period);
  c.nominal_aligned = wrap(nominal, period);
  if (beta < 0.0) c.warnings.push_back("effective aligned position lags the nominal one");
  return c;
}

CommutationAngles derive_commutation(const MotorSpec& spec, double current, Mode mode, double grid_step,
                                     int threads) {
  const auto curve = torque_angle_curve(spec, {current}, mode, grid_step, {}, threads).front();
  const auto sym = torque_angle_curve(symmetric_variant(spec), {current}, mode, grid_step, {}, threads).front();
  const double nominal = main_positive_lobe(sym).second;
  return extract_commutation_angles(curve, spec.half_pitch(), nominal);
}

double positive_span(const TorqueAngleCurve& curve) {
  const auto [rise, fall] = main_positive_lobe(curve);
  return wrap(fall - rise, curve.period());
}

}  // namespace srm
