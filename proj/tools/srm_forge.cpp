// srm_forge: batch front-end for characterization, simulation, verification and comparison runs.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "srm/error.hpp"
#include "srm/metrics_report.hpp"
#include "srm/parallel.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srm;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

struct Options {
  std::string spec_path;
  std::string preset_name;
  std::vector<std::string> motors;
  std::vector<double> currents;
  double speed_rpm = 600.0;
  double t_end = 0.0;  // 0: settling + steady cycles + 2
  double dt = 1e-6;
  std::string mode = "saturable";
  std::string out = "srm_out";
  bool plots = false;
  std::string baseline = "motor1";
  double grid_step = 0.1;
  // drive overrides
  double i_ref = 6.0;
  double delta = 0.2;
  double v_dc = 150.0;
  std::string commutation = "proposed";
  std::string chopping = "hard";
  int cycles = 5;
  std::string trace_path;
  int samples = 200;
};

struct Motor {
  std::string label;
  MotorSpec spec;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text, std::vector<std::string>& files) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
  files.push_back(p.string());
}

std::string preset_for(const std::string& motor) {
  if (motor.rfind("table1-", 0) == 0) return motor;
  if (motor.rfind("motor", 0) == 0) return "table1-" + motor;
  return "table1-motor" + motor;
}

std::string label_for(const std::string& preset_name) {
  const auto dash = preset_name.find('-');
  return dash == std::string::npos ? preset_name : preset_name.substr(dash + 1);
}

std::vector<Motor> resolve_motors(const Options& o) {
  if (!o.spec_path.empty() && !o.preset_name.empty()) throw ConfigError("--spec and --preset are exclusive");
  if (!o.spec_path.empty()) {
    try {
      return {{fs::path(o.spec_path).stem().string(), load_motor_spec(read_file(o.spec_path))}};
    } catch (const ConfigError& e) {
      throw ConfigError(o.spec_path + ": " + e.what());
    }
  }
  if (!o.preset_name.empty()) return {{label_for(o.preset_name), preset(o.preset_name)}};
  std::vector<std::string> names = o.motors;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = {"1", "2", "3", "4"};
  std::vector<Motor> out;
  for (const auto& n : names) {
    const std::string p = preset_for(n);
    out.push_back({label_for(p), preset(p)});
  }
  return out;
}

Mode resolve_mode(const Options& o) { return parse_mode(o.mode); }

std::string current_tag(double i) {
  std::ostringstream os;
  os << i;
  std::string s = os.str();
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s + "A";
}

std::string fmt(double v, const char* f = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json angles_json(const CommutationAngles& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"theta_on", c.theta_on},
          {"theta_off", c.theta_off},
          {"aligned_angle", c.aligned_angle},
          {"unaligned_angle", c.unaligned_angle},
          {"nominal_aligned", c.nominal_aligned},
          {"self_starting", c.self_starting},
          {"warnings", c.warnings},
          {"units", "mech deg"}};
}

struct Manifest {
  json j;
  std::vector<std::string> files;

  Manifest(const std::string& cmd, const std::vector<std::string>& argv, const Options& o) {
    j["tool"] = "srm_forge";
    j["version"] = kToolVersion;
    j["subcommand"] = cmd;
    j["argv"] = argv;
    j["config"] = {{"spec", o.spec_path},     {"preset", o.preset_name},  {"motors", o.motors},
                   {"currents", o.currents},  {"speed_rpm", o.speed_rpm}, {"t_end", o.t_end},
                   {"dt", o.dt},              {"mode", o.mode},           {"out", o.out},
                   {"plots", o.plots},        {"baseline", o.baseline},   {"grid_step", o.grid_step},
                   {"i_ref", o.i_ref},        {"delta", o.delta},         {"v_dc", o.v_dc},
                   {"commutation", o.commutation}, {"chopping", o.chopping}, {"cycles", o.cycles}};
    j["threads"] = default_threads();
    j["specs"] = json::array();
  }

  void add_spec(const Motor& m) {
    j["specs"].push_back({{"label", m.label}, {"hash", spec_hash(m.spec)}, {"spec", json::parse(to_json(m.spec))}});
  }

  void write(const Options& o) {
    j["files"] = files;
    const fs::path p = fs::path(o.out) / "manifest.json";
    fs::create_directories(p.parent_path());
    std::ofstream(p) << j.dump(2) << '\n';
  }
};

// ---------------------------------------------------------------------------
// Characterize

struct MotorCurves {
  std::vector<TorqueAngleCurve> curves;
  CommutationAngles angles;
};

MotorCurves characterize_motor(const Motor& m, const std::vector<double>& currents, Mode mode, double step,
                               int threads) {
  MotorCurves mc;
  mc.curves = torque_angle_curve(m.spec, currents, mode, step, {}, threads);
  const double i_max = *std::max_element(currents.begin(), currents.end());
  size_t k_max = 0;
  for (size_t k = 0; k < currents.size(); ++k)
    if (currents[k] == i_max) k_max = k;
  const auto sym = torque_angle_curve(symmetric_variant(m.spec), {i_max}, mode, step, {}, threads).front();
  mc.angles = extract_commutation_angles(mc.curves[k_max], m.spec.half_pitch(), main_positive_lobe(sym).second);
  return mc;
}

std::string curve_csv(const TorqueAngleCurve& c) {
  std::string s = "angle_mech_deg,torque_Nm\n";
  for (size_t k = 0; k < c.angles.size(); ++k) s += fmt(c.angles[k]) + "," + fmt(c.torque[k]) + "\n";
  return s;
}

json curve_meta(const TorqueAngleCurve& c, const std::string& label) {
  json j = {{"motor", label},
            {"topology", to_string(c.topology)},
            {"current_A", c.current},
            {"spec_hash", c.spec_hash},
            {"mode", to_string(c.mode)},
            {"grid_step_mech_deg", c.grid_step},
            {"delta_mech_deg", c.delta_deg},
            {"current_steps", c.current_steps},
            {"mean_window", "main positive lobe [unaligned, effective aligned] of the excited phase"}};
  if (c.peak() > 0.0) {
    const auto s = static_summary(c);
    j["window_mean_Nm"] = s.mean;
    j["window_peak_Nm"] = s.peak;
  }
  return j;
}

int cmd_characterize(const Options& o, Manifest& man) {
  if (o.currents.empty()) throw ConfigError("--currents must list at least one current");
  const auto motors = resolve_motors(o);
  const Mode mode = resolve_mode(o);
  const int threads = default_threads();
  const fs::path out(o.out);
  std::string summary = "motor,current_A,window_mean_Nm,window_peak_Nm,net_work_Nm_rad\n";
  for (const auto& m : motors) {
    man.add_spec(m);
    const MotorCurves mc = characterize_motor(m, o.currents, mode, o.grid_step, threads);
    std::vector<svg::Series> series;
    for (const auto& c : mc.curves) {
      const std::string stem = m.label + "_" + current_tag(c.current);
      write_file(out / "curves" / (stem + ".csv"), curve_csv(c), man.files);
      write_file(out / "curves" / (stem + ".meta.json"), curve_meta(c, m.label).dump(2) + "\n", man.files);
      const auto s = c.peak() > 0.0 ? static_summary(c) : StaticSummary{};
      summary += m.label + "," + fmt(c.current) + "," + fmt(s.mean) + "," + fmt(s.peak) + "," + fmt(net_work(c)) +
                 "\n";
      series.push_back({current_tag(c.current), c.angles, c.torque});
    }
    json aj = angles_json(mc.angles);
    aj["motor"] = m.label;
    aj["spec_hash"] = spec_hash(m.spec);
    aj["mode"] = to_string(mode);
    aj["current_A"] = *std::max_element(o.currents.begin(), o.currents.end());
    aj["grid_step_mech_deg"] = o.grid_step;
    write_file(out / ("angles_" + m.label + ".json"), aj.dump(2) + "\n", man.files);
    for (const auto& w : mc.angles.warnings) std::cerr << m.label << ": warning: " << w << "\n";
    if (o.plots)
      write_file(out / "plots" / (m.label + "_torque_angle.svg"),
                 svg::line_chart(m.label + " static torque", "rotor angle (mech deg)", "torque (N*m)", series),
                 man.files);
    std::cout << m.label << ": alpha " << fmt(mc.angles.alpha, "%.3f") << ", beta " << fmt(mc.angles.beta, "%.3f")
              << ", theta_on " << fmt(mc.angles.theta_on, "%.3f") << " mech deg\n";
  }
  write_file(out / "static_summary.csv", summary, man.files);
  return kOk;
}

// ---------------------------------------------------------------------------
// Simulate

DriveConfig drive_from(const Options& o, const MotorSpec& spec, const CommutationAngles& angles) {
  DriveConfig d;
  d.i_ref = o.i_ref;
  d.delta = o.delta;
  d.v_dc = o.v_dc;
  d.rotor_teeth = spec.rotor_teeth;
  d.commutation = angles;
  if (o.commutation == "proposed") d.mode = CommutationMode::Proposed;
  else if (o.commutation == "conventional") d.mode = CommutationMode::Conventional;
  else throw ConfigError("--commutation must be 'proposed' or 'conventional'");
  if (o.chopping == "hard") d.chopping = Chopping::Hard;
  else if (o.chopping == "soft") d.chopping = Chopping::Soft;
  else throw ConfigError("--chopping must be 'hard' or 'soft'");
  validate(d);
  return d;
}

struct SimResult {
  SimulationTrace trace;
  SimulationTrace window;
  PerformanceMetrics metrics;
  CommutationAngles angles;
  bool floor_hit = false;
};

SimResult run_simulation(const Motor& m, const Options& o, Mode mode, int threads) {
  SimResult r;
  const MagneticMaps maps = precompute_maps(m.spec, mode, {}, {}, threads);
  r.angles = derive_commutation(m.spec, o.i_ref, mode, o.grid_step, threads);
  const DriveConfig drive = drive_from(o, m.spec, r.angles);
  const double cycle = m.spec.rotor_pitch() / (6.0 * o.speed_rpm);
  const double t_end = o.t_end > 0.0 ? o.t_end : (kSettlingCycles + o.cycles + 2) * cycle;
  r.trace = simulate(m.spec, maps, drive, o.speed_rpm, t_end, o.dt);
  r.window = steady_state_window(r.trace, o.cycles);
  r.metrics = compute_metrics(r.window, m.spec);
  r.floor_hit = r.trace.inductance_floor_hit;
  return r;
}

int cmd_simulate(const Options& o, Manifest& man) {
  const auto motors = resolve_motors(o);
  const Mode mode = resolve_mode(o);
  const fs::path out(o.out);
  const int threads = default_threads();
  std::vector<SimResult> results(motors.size());
  for (const auto& m : motors) man.add_spec(m);
  // Scenarios are independent; each worker owns its result slot.
  parallel_for(static_cast<int>(motors.size()), threads,
               [&](int k) { results[k] = run_simulation(motors[k], o, mode, 1); });

  for (size_t k = 0; k < motors.size(); ++k) {
    const auto& m = motors[k];
    const auto& r = results[k];
    std::ostringstream csv;
    write_trace_csv(r.trace, csv);
    write_file(out / ("trace_" + m.label + ".csv"), csv.str(), man.files);
    json meta = {{"motor", m.label},
                 {"spec_hash", spec_hash(m.spec)},
                 {"mode", o.mode},
                 {"dt", o.dt},
                 {"speed_rpm", o.speed_rpm},
                 {"t_end", r.trace.time.back()},
                 {"settling_cycles", kSettlingCycles},
                 {"steady_cycles", o.cycles},
                 {"drive",
                  {{"i_ref", o.i_ref},
                   {"delta", o.delta},
                   {"v_dc", o.v_dc},
                   {"commutation", o.commutation},
                   {"chopping", o.chopping}}},
                 {"commutation_angles", angles_json(r.angles)},
                 {"band_contained", true},
                 {"inductance_floor_hit", r.floor_hit}};
    write_file(out / ("trace_" + m.label + ".meta.json"), meta.dump(2) + "\n", man.files);
    json mj = json::parse(metrics_to_json(r.metrics));
    mj["motor"] = m.label;
    mj["identity_error"] = metrics_identity_error(r.metrics, m.spec.active_volume);
    mj["band_contained"] = true;
    write_file(out / ("metrics_" + m.label + ".json"), mj.dump(2) + "\n", man.files);
    if (o.plots) {
      const auto& w = r.window;
      std::vector<double> t_ms(w.time.size());
      for (size_t i = 0; i < t_ms.size(); ++i) t_ms[i] = 1e3 * w.time[i];
      write_file(out / "plots" / (m.label + "_voltage.svg"),
                 svg::line_chart(m.label + " phase voltage", "time (ms)", "V", {{"v_A", t_ms, w.v_a}, {"v_B", t_ms, w.v_b}}),
                 man.files);
      write_file(out / "plots" / (m.label + "_current.svg"),
                 svg::line_chart(m.label + " phase current", "time (ms)", "A", {{"i_A", t_ms, w.i_a}, {"i_B", t_ms, w.i_b}}),
                 man.files);
      write_file(out / "plots" / (m.label + "_torque.svg"),
                 svg::line_chart(m.label + " torque", "time (ms)", "N*m",
                                 {{"T_A", t_ms, w.t_a}, {"T_B", t_ms, w.t_b}, {"T_total", t_ms, w.t_total}}),
                 man.files);
    }
    std::cout << m.label << ": T_mean " << fmt(r.metrics.t_mean, "%.4f") << " N*m, ripple "
              << fmt(r.metrics.ripple_pct, "%.1f") << " %, I_rms " << fmt(r.metrics.i_rms, "%.3f")
              << " A, efficiency " << fmt(r.metrics.efficiency_pct, "%.2f") << " %\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Verify

double rel_diff(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

int cmd_verify(const Options& o, Manifest& man) {
  const auto motors = resolve_motors(o);
  const Mode mode = resolve_mode(o);
  const int threads = default_threads();
  bool all_pass = true;
  json report = json::array();
  std::mt19937_64 rng(20240611);
  for (const auto& m : motors) {
    man.add_spec(m);
    std::uniform_real_distribution<double> ang(0.0, m.spec.rotor_pitch());
    std::uniform_real_distribution<double> cur(0.0, 8.0);
    double worst = 0.0, worst_sum = 0.0;
    for (int s = 0; s < o.samples; ++s) {
      const double th = ang(rng), i = cur(rng);
      const auto cf = solve_closed_form(m.spec, th, i, Mode::Linear);
      const auto nw =
          solve_network(build_network(m.spec, th, i, Phase::A, Mode::Linear, NetworkForm::Simplified), {0.0, 200});
      worst = std::max({worst, rel_diff(cf.phi_sy, nw.phi_sy), rel_diff(cf.phi_sp, nw.phi_sp),
                        rel_diff(cf.phi_g, nw.phi_g)});
      worst_sum = std::max({worst_sum, nw.sy.split_error(nw.phi_sy), nw.sp.split_error(nw.phi_sp),
                            nw.g.split_error(nw.phi_g)});
    }
    const bool eq_pass = worst <= 1e-9 && worst_sum <= 1e-12;

    const auto dom = check_dominance(build_network(m.spec, 0.0, 0.0, Phase::A, Mode::Linear));
    json ratios = json::array();
    for (const auto& r : dom.ratios) ratios.push_back({{"name", r.name}, {"value", r.value}});

    const double i_test = o.currents.empty() ? 6.0 : o.currents.front();
    const auto curve = torque_angle_curve(m.spec, {i_test}, mode, o.grid_step, {}, threads).front();
    const double work = std::abs(net_work(curve));
    const double bound = 1e-3 * curve.peak() * deg2rad(curve.period());
    const bool work_pass = work <= bound;

    const bool pass = eq_pass && dom.pass && work_pass;
    all_pass = all_pass && pass;
    report.push_back({{"motor", m.label},
                      {"closed_form_equivalence", {{"samples", o.samples}, {"max_rel_diff", worst},
                                                   {"max_superposition_diff", worst_sum}, {"pass", eq_pass}}},
                      {"dominance", {{"threshold", dom.threshold}, {"ratios", ratios}, {"pass", dom.pass}}},
                      {"net_zero_work", {{"current_A", i_test}, {"abs_work", work}, {"bound", bound},
                                         {"pass", work_pass}}},
                      {"pass", pass}});
    std::cout << m.label << ": closed form " << (eq_pass ? "PASS" : "FAIL") << " (" << fmt(worst, "%.2e")
              << "), dominance " << (dom.pass ? "PASS" : "FAIL") << ", net-zero work "
              << (work_pass ? "PASS" : "FAIL") << " (" << fmt(work, "%.2e") << " <= " << fmt(bound, "%.2e")
              << ")\n";
  }
  write_file(fs::path(o.out) / "verify.json", report.dump(2) + "\n", man.files);
  return all_pass ? kOk : kVerification;
}

// ---------------------------------------------------------------------------
// Compare

int cmd_compare(const Options& o, Manifest& man) {
  const auto motors = resolve_motors(o);
  if (motors.size() < 2) throw ConfigError("compare needs at least two motors");
  size_t base = motors.size();
  for (size_t k = 0; k < motors.size(); ++k)
    if (motors[k].label == o.baseline) base = k;
  if (base == motors.size()) throw ConfigError("baseline '" + o.baseline + "' is not among the motors");
  const Mode mode = resolve_mode(o);
  const int threads = default_threads();
  const std::vector<double> currents = o.currents.empty() ? std::vector<double>{6.0} : o.currents;
  const fs::path out(o.out);
  for (const auto& m : motors) man.add_spec(m);

  // Static means over each motor's own conduction window.
  std::vector<std::vector<double>> means(motors.size());
  for (size_t k = 0; k < motors.size(); ++k)
    for (const auto& c : torque_angle_curve(motors[k].spec, currents, mode, o.grid_step, {}, threads))
      means[k].push_back(c.peak() > 0.0 ? static_summary(c).mean : 0.0);
  std::string matrix = "current_A";
  for (const auto& m : motors) matrix += "," + m.label + "_mean_Nm";
  for (size_t k = 0; k < motors.size(); ++k)
    if (k != base) matrix += "," + motors[k].label + "_vs_" + motors[base].label + "_pct";
  matrix += ",ordering\n";
  for (size_t c = 0; c < currents.size(); ++c) {
    matrix += fmt(currents[c]);
    for (size_t k = 0; k < motors.size(); ++k) matrix += "," + format_sig(means[k][c]);
    for (size_t k = 0; k < motors.size(); ++k)
      if (k != base) matrix += "," + format_sig(percent_increase(means[base][c], means[k][c]));
    std::vector<size_t> order(motors.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return means[a][c] > means[b][c]; });
    std::string ord;
    for (size_t k = 0; k < order.size(); ++k) ord += (k ? " > " : "") + motors[order[k]].label;
    matrix += "," + ord + "\n";
  }
  write_file(out / "static_percent.csv", matrix, man.files);

  std::vector<SimResult> results(motors.size());
  parallel_for(static_cast<int>(motors.size()), threads,
               [&](int k) { results[k] = run_simulation(motors[k], o, mode, 1); });
  std::vector<ReportEntry> entries;
  for (size_t k = 0; k < motors.size(); ++k)
    entries.push_back({motors[k].label, results[k].metrics, pm_volume_litres(motors[k].spec)});
  const auto rep = comparison_report(entries, base);
  write_file(out / "compare.csv", rep.csv, man.files);
  write_file(out / "compare.txt", rep.text, man.files);
  std::cout << "static window means:\n" << matrix << "\ndynamic comparison:\n" << rep.text;
  return kOk;
}

// ---------------------------------------------------------------------------
// Metrics from an existing trace

int cmd_metrics(const Options& o, Manifest& man) {
  if (o.trace_path.empty()) throw ConfigError("--trace is required");
  const auto motors = resolve_motors(o);
  if (motors.size() != 1) throw ConfigError("metrics needs exactly one motor");
  const Motor& m = motors.front();
  man.add_spec(m);
  std::ifstream in(o.trace_path);
  if (!in) throw ConfigError("cannot read '" + o.trace_path + "'");
  SimulationTrace tr;
  try {
    tr = read_trace_csv(in, o.speed_rpm, m.spec.rotor_pitch());
  } catch (const ConfigError& e) {
    throw ConfigError(o.trace_path + ": " + e.what());
  }
  const auto w = steady_state_window(tr, o.cycles);
  const auto met = compute_metrics(w, m.spec);
  json mj = json::parse(metrics_to_json(met));
  mj["motor"] = m.label;
  mj["source_trace"] = o.trace_path;
  mj["identity_error"] = metrics_identity_error(met, m.spec.active_volume);
  write_file(fs::path(o.out) / ("metrics_" + m.label + ".json"), mj.dump(2) + "\n", man.files);
  std::cout << mj.dump(2) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--spec", o.spec_path, "motor spec JSON file");
  sub->add_option("--preset", o.preset_name, "built-in preset, e.g. table1-motor4");
  sub->add_option("--motors", o.motors, "motors to run: 1..4, motorK or all")->delimiter(',');
  sub->add_option("--mode", o.mode, "linear or saturable")->check(CLI::IsMember({"linear", "saturable"}));
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--grid-step", o.grid_step, "torque-angle grid step, mech deg");
}

void add_drive(CLI::App* sub, Options& o) {
  sub->add_option("--speed-rpm", o.speed_rpm, "fixed rotor speed");
  sub->add_option("--t-end", o.t_end, "simulated time, s (default: settling + steady cycles + 2)");
  sub->add_option("--dt", o.dt, "time step, s");
  sub->add_option("--i-ref", o.i_ref, "hysteresis reference current, A");
  sub->add_option("--delta", o.delta, "hysteresis half band, A");
  sub->add_option("--v-dc", o.v_dc, "DC link voltage, V");
  sub->add_option("--commutation", o.commutation, "proposed or conventional");
  sub->add_option("--chopping", o.chopping, "hard or soft");
  sub->add_option("--cycles", o.cycles, "steady-state electrical cycles used for metrics");
  sub->add_flag("--plots", o.plots, "write SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switched reluctance motor characterization and drive simulation"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;

  auto* ch = app.add_subcommand("characterize", "static torque-angle curves and commutation angles");
  add_common(ch, o);
  ch->add_option("--currents", o.currents, "phase currents, A")->delimiter(',')->required();
  ch->add_flag("--plots", o.plots, "write SVG plots");

  auto* sim = app.add_subcommand("simulate", "fixed-speed drive simulation");
  add_common(sim, o);
  add_drive(sim, o);

  auto* ver = app.add_subcommand("verify", "closed-form equivalence, dominance and net-zero-work checks");
  add_common(ver, o);
  ver->add_option("--currents", o.currents, "current for the net-zero-work curve, A")->delimiter(',');
  ver->add_option("--samples", o.samples, "random operating points per motor");

  auto* cmp = app.add_subcommand("compare", "static and dynamic comparison against a baseline motor");
  add_common(cmp, o);
  add_drive(cmp, o);
  cmp->add_option("--currents", o.currents, "currents for the static mean matrix, A")->delimiter(',');
  cmp->add_option("--baseline", o.baseline, "baseline motor label");

  auto* met = app.add_subcommand("metrics", "re-derive metrics from a trace CSV");
  add_common(met, o);
  met->add_option("--trace", o.trace_path, "trace CSV written by simulate")->required();
  met->add_option("--speed-rpm", o.speed_rpm, "speed; 0 infers it from the trace");
  met->add_option("--cycles", o.cycles, "steady-state electrical cycles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const std::vector<std::string> args(argv, argv + argc);
  CLI::App* cmd = app.get_subcommands().front();
  Manifest man(cmd->get_name(), args, o);
  try {
    int rc = kOk;
    if (cmd == ch) rc = cmd_characterize(o, man);
    else if (cmd == sim) rc = cmd_simulate(o, man);
    else if (cmd == ver) rc = cmd_verify(o, man);
    else if (cmd == cmp) rc = cmd_compare(o, man);
    else rc = cmd_metrics(o, man);
    man.j["exit_code"] = rc;
    man.write(o);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
