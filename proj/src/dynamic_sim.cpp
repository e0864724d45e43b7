#include "srm/dynamic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "srm/error.hpp"
#include "srm/parallel.hpp"

namespace srm {

namespace {

double wrap(double x, double period) { return x - period * std::floor(x / period); }

}  // namespace

// ---------------------------------------------------------------------------
// Maps

double MagneticMaps::interpolate(const std::vector<double>& table, double theta, double current) const {
  const double x = wrap(theta, pitch) / grid.theta_step;
  int t0 = static_cast<int>(std::floor(x));
  const double ft = x - t0;
  t0 %= n_theta;
  const int t1 = (t0 + 1) % n_theta;
  const double y = std::max(current, 0.0) / grid.current_step;
  const int c0 = std::min(static_cast<int>(std::floor(y)), n_current - 2);
  const double fc = y - c0;  // exceeds 1 above i_max: linear extrapolation
  auto at = [&](int t, int c) { return table[static_cast<size_t>(t) * n_current + c]; };
  const double a = at(t0, c0) + fc * (at(t0, c0 + 1) - at(t0, c0));
  const double b = at(t1, c0) + fc * (at(t1, c0 + 1) - at(t1, c0));
  return a + ft * (b - a);
}

double MagneticMaps::lambda_at(double theta, double current) const { return interpolate(lambda, theta, current); }

double MagneticMaps::torque_at(double theta, double current) const { return interpolate(torque, theta, current); }

double MagneticMaps::dlambda_dtheta(double theta, double current) const {
  const double h = grid.theta_step;
  return (lambda_at(theta + h, current) - lambda_at(theta - h, current)) / (2.0 * deg2rad(h));
}

double MagneticMaps::dlambda_di(double theta, double current) const {
  const double h = grid.current_step;
  const double i = std::max(current, 0.0);
  const double lo = std::max(i - h, 0.0);
  return (lambda_at(theta, i + h) - lambda_at(theta, lo)) / (i + h - lo);
}

MagneticMaps precompute_maps(const MotorSpec& spec, Mode mode, const MapGrid& grid, const TorqueOptions& opt,
                             int threads) {
  const double pitch = spec.rotor_pitch();
  const double cells = pitch / grid.theta_step;
  const int n_theta = static_cast<int>(std::lround(cells));
  const double nodes = grid.i_max / grid.current_step;
  const int n_current = static_cast<int>(std::lround(nodes)) + 1;
  if (!(grid.theta_step > 0.0) || n_theta < 4 || std::abs(cells - n_theta) > 1e-9 * cells)
    throw ConfigError("map angle step must divide the rotor pitch");
  if (!(grid.current_step > 0.0) || n_current < 3 || std::abs(nodes - (n_current - 1)) > 1e-9 * nodes)
    throw ConfigError("map current step must divide i_max");

  MagneticMaps maps;
  maps.grid = grid;
  maps.n_theta = n_theta;
  maps.n_current = n_current;
  maps.pitch = pitch;
  maps.spec_hash = spec_hash(spec);
  maps.mode = mode;
  maps.torque_options = opt;
  maps.lambda.assign(static_cast<size_t>(n_theta) * n_current, 0.0);
  maps.torque.assign(static_cast<size_t>(n_theta) * n_current, 0.0);

  const double h = grid.current_step;
  auto sweep = [&](double theta, std::vector<double>& out) {
    std::vector<double> guess;
    for (int c = 0; c < n_current; ++c) {
      const double i = h * c;
      try {
        const auto r = flux_linkage_detail(spec, theta, i, Phase::A, mode, guess.empty() ? nullptr : &guess);
        guess = r.solution.potentials;
        out[c] = r.lambda;
      } catch (const NumericalError& e) {
        std::ostringstream os;
        os << e.what() << " [map node theta=" << theta << " deg, i=" << i << " A]";
        throw NumericalError(os.str());
      }
    }
  };
  auto cumulative = [&](const std::vector<double>& lam) {
    std::vector<double> w(n_current, 0.0);
    for (int c = 1; c < n_current; ++c) w[c] = w[c - 1] + 0.5 * h * (lam[c - 1] + lam[c]);
    return w;
  };

  const double d = opt.delta_deg;
  parallel_for(n_theta, threads, [&](int t) {
    const double theta = t * grid.theta_step;
    std::vector<double> mid(n_current), plus(n_current), minus(n_current);
    sweep(theta, mid);
    sweep(theta + d, plus);
    sweep(theta - d, minus);
    const auto wp = cumulative(plus);
    const auto wm = cumulative(minus);
    double cog = 0.0;
    if (opt.magnet_coenergy)
      cog = magnet_coenergy(spec, theta + d, mode, opt.magnet_steps) -
            magnet_coenergy(spec, theta - d, mode, opt.magnet_steps);
    for (int c = 0; c < n_current; ++c) {
      const size_t idx = static_cast<size_t>(t) * n_current + c;
      maps.lambda[idx] = mid[c];
      maps.torque[idx] = (wp[c] - wm[c] + cog) / (2.0 * deg2rad(d));
    }
  });
  return maps;
}

// ---------------------------------------------------------------------------
// Simulation

SimulationTrace SimulationTrace::slice(size_t begin, size_t end) const {
  SimulationTrace s;
  auto cut = [&](const auto& v, auto& out) { out.assign(v.begin() + begin, v.begin() + end); };
  cut(time, s.time);
  cut(theta, s.theta);
  cut(i_a, s.i_a);
  cut(i_b, s.i_b);
  cut(v_a, s.v_a);
  cut(v_b, s.v_b);
  if (!s_a.empty()) {
    cut(s_a, s.s_a);
    cut(s_b, s.s_b);
    cut(c_a, s.c_a);
    cut(c_b, s.c_b);
  }
  cut(g_a, s.g_a);
  cut(g_b, s.g_b);
  cut(t_a, s.t_a);
  cut(t_b, s.t_b);
  cut(t_total, s.t_total);
  s.speed_rpm = speed_rpm;
  s.dt = dt;
  s.pitch = pitch;
  s.theta0 = theta0;
  s.inductance_floor_hit = inductance_floor_hit;
  return s;
}

SimulationTrace simulate(const MotorSpec& spec, const MagneticMaps& maps, const DriveConfig& drive,
                         double speed_rpm, double t_end, double dt, const SimulationOptions& opt) {
  if (!(speed_rpm > 0.0)) throw ConfigError("speed must be positive");
  if (!(dt > 0.0) || dt > 5e-6) throw ConfigError("dt must be in (0, 5 us]");
  if (!(t_end > dt)) throw ConfigError("t_end must exceed dt");
  if (maps.spec_hash != spec_hash(spec)) throw ConfigError("magnetic maps were built for a different spec");
  if (drive.i_ref + drive.delta > maps.grid.i_max)
    throw ConfigError("magnetic maps do not cover the hysteresis band");

  Controller ctl(drive);
  const double w_deg = speed_rpm * 6.0;
  const double w_rad = speed_rpm * 2.0 * kPi / 60.0;
  const double half = 0.5 * maps.pitch;
  const double r = spec.phase_resistance;
  const long long steps = std::llround(t_end / dt);

  // Band tolerance: the largest current change one step can produce near i_ref.
  double l_min = 1e300, emf_max = 0.0;
  for (int t = 0; t < maps.n_theta; ++t) {
    const double th = t * maps.grid.theta_step;
    for (double i = drive.i_ref - drive.delta - 0.5; i <= drive.i_ref + drive.delta + 0.5; i += maps.grid.current_step) {
      l_min = std::min(l_min, std::max(maps.dlambda_di(th, i), opt.inductance_floor));
      emf_max = std::max(emf_max, std::abs(w_rad * maps.dlambda_dtheta(th, i)));
    }
  }
  const double slew = (drive.v_dc + emf_max + r * (drive.i_ref + drive.delta)) * dt / l_min;

  SimulationTrace tr;
  tr.speed_rpm = speed_rpm;
  tr.dt = dt;
  tr.pitch = maps.pitch;
  tr.theta0 = opt.theta0;
  const size_t n = static_cast<size_t>(steps) + 1;
  for (auto* v : {&tr.time, &tr.theta, &tr.i_a, &tr.i_b, &tr.v_a, &tr.v_b, &tr.t_a, &tr.t_b, &tr.t_total})
    v->reserve(n);
  for (auto* v : {&tr.s_a, &tr.s_b, &tr.c_a, &tr.c_b, &tr.g_a, &tr.g_b}) v->reserve(n);

  auto deriv = [&](double th, double i, double v) {
    const double ii = std::max(i, 0.0);
    double l = maps.dlambda_di(th, ii);
    if (l < opt.inductance_floor) {
      l = opt.inductance_floor;
      tr.inductance_floor_hit = true;
    }
    return (v - r * ii - w_rad * maps.dlambda_dtheta(th, ii)) / l;
  };
  auto advance = [&](double th, double i, double v, bool g) {
    if (!g && i <= 0.0) return 0.0;  // blocked by the diodes
    const double k1 = deriv(th, i, v);
    const double k2 = deriv(th + 0.5 * w_deg * dt, i + 0.5 * dt * k1, v);
    const double k3 = deriv(th + 0.5 * w_deg * dt, i + 0.5 * dt * k2, v);
    const double k4 = deriv(th + w_deg * dt, i + dt * k3, v);
    const double next = i + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return next < 0.0 ? 0.0 : next;
  };

  double i_a = 0.0, i_b = 0.0;
  bool reg_a = false, reg_b = false;
  const double lo = drive.i_ref - drive.delta - slew;
  const double hi = drive.i_ref + drive.delta + slew;
  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double th = opt.theta0 + w_deg * t;
    const GateState& gs = ctl.step(th, i_a, i_b);
    if (gs.g_a != (gs.s_a && gs.c_a) || gs.g_b != (gs.s_b && gs.c_b))
      throw NumericalError("gate logic invariant violated");
    const double v_a = inverter_voltage(gs.g_a, gs.c_a, i_a, drive);
    const double v_b = inverter_voltage(gs.g_b, gs.c_b, i_b, drive);
    const double ta = maps.torque_at(th, i_a);
    const double tb = maps.torque_at(th - half, i_b);
    tr.time.push_back(t);
    tr.theta.push_back(th);
    tr.i_a.push_back(i_a);
    tr.i_b.push_back(i_b);
    tr.v_a.push_back(v_a);
    tr.v_b.push_back(v_b);
    tr.s_a.push_back(gs.s_a);
    tr.s_b.push_back(gs.s_b);
    tr.c_a.push_back(gs.c_a);
    tr.c_b.push_back(gs.c_b);
    tr.g_a.push_back(gs.g_a);
    tr.g_b.push_back(gs.g_b);
    tr.t_a.push_back(ta);
    tr.t_b.push_back(tb);
    tr.t_total.push_back(ta + tb);
    if (k == steps) break;

    const bool ga = gs.g_a, gb = gs.g_b, ca = gs.c_a, cb = gs.c_b;
    i_a = advance(th, i_a, v_a, ga);
    i_b = advance(th - half, i_b, v_b, gb);

    if (opt.check_band) {
      reg_a = ca && (reg_a || i_a >= drive.i_ref - drive.delta);
      reg_b = cb && (reg_b || i_b >= drive.i_ref - drive.delta);
      if ((reg_a && (i_a > hi || i_a < lo)) || (reg_b && (i_b > hi || i_b < lo))) {
        std::ostringstream os;
        os << "phase current left the hysteresis band by more than one step of slew at t=" << t + dt
           << " s; reduce dt";
        throw NumericalError(os.str());
      }
    }
  }
  return tr;
}

std::vector<size_t> cycle_boundaries(const SimulationTrace& trace) {
  std::vector<size_t> b;
  if (trace.size() == 0) return b;
  b.push_back(0);
  auto cycle = [&](size_t k) {
    return static_cast<long long>(std::floor((trace.theta[k] - trace.theta0) / trace.pitch + 1e-9));
  };
  long long prev = cycle(0);
  for (size_t k = 1; k < trace.size(); ++k) {
    const long long c = cycle(k);
    if (c != prev) b.push_back(k);
    prev = c;
  }
  return b;
}

SimulationTrace steady_state_window(const SimulationTrace& trace, int n_cycles, int settling) {
  if (n_cycles < 1) throw ConfigError("steady-state window needs at least one cycle");
  const auto b = cycle_boundaries(trace);
  const int complete = static_cast<int>(b.size()) - 1;
  if (complete < n_cycles + settling) {
    std::ostringstream os;
    os << "trace too short: " << complete << " complete cycles, need " << n_cycles << " + " << settling
       << " settling";
    throw ConfigError(os.str());
  }
  return trace.slice(b[complete - n_cycles], b[complete]);
}

// ---------------------------------------------------------------------------
// CSV

std::string trace_csv_header() { return "t_s,theta_mech_deg,i_A,i_B,v_A,v_B,G_A,G_B,T_A,T_B,T_total"; }

void write_trace_csv(const SimulationTrace& tr, std::ostream& out) {
  out << trace_csv_header() << '\n';
  char buf[512];
  for (size_t k = 0; k < tr.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d,%.9g,%.9g,%.9g\n", tr.time[k], tr.theta[k],
                  tr.i_a[k], tr.i_b[k], tr.v_a[k], tr.v_b[k], tr.g_a[k], tr.g_b[k], tr.t_a[k], tr.t_b[k],
                  tr.t_total[k]);
    out << buf;
  }
}

SimulationTrace read_trace_csv(std::istream& in, double speed_rpm, double pitch) {
  std::string line;
  if (!std::getline(in, line) || line != trace_csv_header())
    throw ConfigError("trace CSV header mismatch; expected '" + trace_csv_header() + "'");
  SimulationTrace tr;
  tr.pitch = pitch;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double v[11];
    std::stringstream ss(line);
    std::string cell;
    int n = 0;
    while (n < 11 && std::getline(ss, cell, ',')) {
      try {
        v[n++] = std::stod(cell);
      } catch (...) {
        throw ConfigError("trace CSV: bad number on row " + std::to_string(row));
      }
    }
    if (n != 11) throw ConfigError("trace CSV: expected 11 columns on row " + std::to_string(row));
    tr.time.push_back(v[0]);
    tr.theta.push_back(v[1]);
    tr.i_a.push_back(v[2]);
    tr.i_b.push_back(v[3]);
    tr.v_a.push_back(v[4]);
    tr.v_b.push_back(v[5]);
    tr.g_a.push_back(static_cast<unsigned char>(v[6] != 0.0));
    tr.g_b.push_back(static_cast<unsigned char>(v[7] != 0.0));
    tr.t_a.push_back(v[8]);
    tr.t_b.push_back(v[9]);
    tr.t_total.push_back(v[10]);
  }
  if (tr.size() < 2) throw ConfigError("trace CSV has fewer than two samples");
  tr.dt = tr.time[1] - tr.time[0];
  tr.theta0 = tr.theta.front();
  tr.speed_rpm = speed_rpm > 0.0 ? speed_rpm : (tr.theta.back() - tr.theta.front()) / (tr.time.back() - tr.time.front()) / 6.0;
  return tr;
}

}  // namespace srm
