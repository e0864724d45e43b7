#include "srm/config_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srm/error.hpp"

namespace srm {

using nlohmann::json;

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Motor1: return "Motor1";
    case Topology::Motor2: return "Motor2";
    case Topology::Motor3: return "Motor3";
    case Topology::Motor4: return "Motor4";
  }
  return "?";
}

Topology parse_topology(std::string_view s) {
  if (s == "Motor1") return Topology::Motor1;
  if (s == "Motor2") return Topology::Motor2;
  if (s == "Motor3") return Topology::Motor3;
  if (s == "Motor4") return Topology::Motor4;
  throw ConfigError("unknown topology_id '" + std::string(s) + "' (expected Motor1..Motor4)");
}

std::string to_string(WidenedTooth w) { return w == WidenedTooth::Inner ? "inner" : "outer"; }

// ---------------------------------------------------------------------------
// BHCurve

BHCurve::BHCurve(std::string name, std::vector<BHPoint> points, double knee_b)
    : name_(std::move(name)), points_(std::move(points)), knee_b_(knee_b) {
  if (points_.size() < 2) throw ConfigError("B-H curve '" + name_ + "' needs at least two points");
  if (points_.front().h != 0.0 || points_.front().b != 0.0)
    throw ConfigError("B-H curve '" + name_ + "' must start at (0, 0)");
  for (size_t k = 1; k < points_.size(); ++k) {
    if (!(points_[k].h > points_[k - 1].h) || !(points_[k].b > points_[k - 1].b))
      throw ConfigError("B-H curve '" + name_ + "' is not strictly increasing at point " +
                        std::to_string(k));
  }
  if (!(knee_b_ > 0.0)) throw ConfigError("B-H curve '" + name_ + "': knee_B must be positive");
}

BHCurve BHCurve::m19_24g() {
  return BHCurve("M19-24G",
                 {{0.0, 0.0},
                  {47.74, 0.36},
                  {79.57, 0.65},
                  {159.15, 0.99},
                  {318.3, 1.20},
                  {636.61, 1.33},
                  {1591.5, 1.44},
                  {3183.1, 1.52},
                  {6366.2, 1.63},
                  {15915.0, 1.80},
                  {31831.0, 1.90},
                  {111408.0, 2.00}},
                 1.9);
}

double BHCurve::field(double b) const {
  const double mag = std::abs(b);
  const auto& last = points_.back();
  double h;
  if (mag >= last.b) {
    h = last.h + (mag - last.b) / kMu0;
  } else {
    auto it = std::upper_bound(points_.begin(), points_.end(), mag,
                               [](double v, const BHPoint& p) { return v < p.b; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    h = lo.h + (mag - lo.b) * (hi.h - lo.h) / (hi.b - lo.b);
  }
  return b < 0.0 ? -h : h;
}

double BHCurve::field_slope(double b) const {
  const double mag = std::abs(b);
  const auto& last = points_.back();
  if (mag >= last.b) return 1.0 / kMu0;
  auto it = std::upper_bound(points_.begin(), points_.end(), mag,
                             [](double v, const BHPoint& p) { return v < p.b; });
  return (it->h - (it - 1)->h) / (it->b - (it - 1)->b);
}

double BHCurve::flux_density(double h) const {
  const double mag = std::abs(h);
  const auto& last = points_.back();
  double b;
  if (mag >= last.h) {
    b = last.b + (mag - last.h) * kMu0;
  } else {
    auto it = std::upper_bound(points_.begin(), points_.end(), mag,
                               [](double v, const BHPoint& p) { return v < p.h; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    b = lo.b + (mag - lo.h) * (hi.b - lo.b) / (hi.h - lo.h);
  }
  return h < 0.0 ? -b : b;
}

double BHCurve::initial_permeability() const { return points_[1].b / points_[1].h; }

bool BHCurve::operator==(const BHCurve& o) const {
  if (name_ != o.name_ || knee_b_ != o.knee_b_ || points_.size() != o.points_.size()) return false;
  for (size_t k = 0; k < points_.size(); ++k)
    if (points_[k].h != o.points_[k].h || points_[k].b != o.points_[k].b) return false;
  return true;
}

bool MotorSpec::operator==(const MotorSpec& o) const {
  const bool lam_eq = (lamination && o.lamination) ? (*lamination == *o.lamination)
                                                   : (lamination == o.lamination);
  return topology == o.topology && outer_diameter == o.outer_diameter &&
         stator_yoke == o.stator_yoke && pole_height == o.pole_height &&
         tooth_yoke == o.tooth_yoke && tooth_length == o.tooth_length && airgap == o.airgap &&
         rotor_pole_length == o.rotor_pole_length && pole_arc == o.pole_arc &&
         tooth_arc == o.tooth_arc && wide_tooth_arc == o.wide_tooth_arc &&
         tooth_extension == o.tooth_extension && rotor_pole_arc == o.rotor_pole_arc &&
         stack_length == o.stack_length && pm_width == o.pm_width &&
         pm1_length == o.pm1_length && pm2_length == o.pm2_length &&
         turns_per_pole == o.turns_per_pole && rotor_teeth == o.rotor_teeth &&
         ccores == o.ccores && teeth_per_pole == o.teeth_per_pole && lam_eq &&
         magnet == o.magnet && phase_resistance == o.phase_resistance &&
         core_loss == o.core_loss && active_volume == o.active_volume &&
         rotor_yoke == o.rotor_yoke && widened == o.widened && fringe_length == o.fringe_length;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

MotorSpec table1_base(Topology t) {
  MotorSpec s;
  s.topology = t;
  switch (t) {
    case Topology::Motor1:
      break;
    case Topology::Motor2:
      s.pm_width = 5.0;
      s.pm1_length = 5.0;
      break;
    case Topology::Motor3:
      s.pm_width = 5.0;
      s.pm2_length = 10.0;
      break;
    case Topology::Motor4:
      s.pm_width = 5.0;
      s.pm1_length = 5.0;
      s.pm2_length = 10.0;
      break;
  }
  return s;
}

const std::map<std::string, Topology, std::less<>>& preset_table() {
  static const std::map<std::string, Topology, std::less<>> table = {
      {"table1-motor1", Topology::Motor1},
      {"table1-motor2", Topology::Motor2},
      {"table1-motor3", Topology::Motor3},
      {"table1-motor4", Topology::Motor4},
  };
  return table;
}

[[noreturn]] void fail_field(const std::string& field, const std::string& expected, double actual,
                             const std::string& hint = {}) {
  std::ostringstream os;
  os << "invalid motor spec: field '" << field << "': expected " << expected << ", got " << actual;
  if (!hint.empty()) os << " (" << hint << ")";
  throw ConfigError(os.str());
}

void require_positive(const std::string& field, double v, const std::string& hint = {}) {
  if (!(v > 0.0) || !std::isfinite(v)) fail_field(field, "> 0", v, hint);
}

}  // namespace

MotorSpec preset(std::string_view name) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown preset '" + std::string(name) + "'");
  return table1_base(it->second);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : preset_table()) out.push_back(k);
  return out;
}

void validate(const MotorSpec& s) {
  require_positive("D_o", s.outer_diameter);
  require_positive("b_sy", s.stator_yoke);
  require_positive("h_s", s.pole_height);
  require_positive("b_ty", s.tooth_yoke);
  require_positive("h_t", s.tooth_length);
  require_positive("l_g", s.airgap, "air-gap length must be positive");
  require_positive("h_r", s.rotor_pole_length);
  require_positive("lambda_pole", s.pole_arc);
  require_positive("beta_s", s.tooth_arc);
  require_positive("beta_s_wide", s.wide_tooth_arc);
  require_positive("beta_r", s.rotor_pole_arc);
  require_positive("L_stack", s.stack_length);
  require_positive("b_ry", s.rotor_yoke);
  if (!(s.tooth_extension >= 0.0)) fail_field("a_ext", ">= 0", s.tooth_extension);
  if (std::abs(s.wide_tooth_arc - (s.tooth_arc + s.tooth_extension)) > 1e-9)
    fail_field("beta_s_wide", "beta_s + a_ext = " + std::to_string(s.tooth_arc + s.tooth_extension),
               s.wide_tooth_arc);
  if (s.rotor_teeth <= 0) fail_field("N_r", "> 0", s.rotor_teeth);
  if (s.turns_per_pole <= 0) fail_field("N_pole", "> 0", s.turns_per_pole);
  if (s.teeth_per_pole != 2) fail_field("m_teeth", "2 (one narrow and one widened tooth)", s.teeth_per_pole);
  if (s.ccores <= 0 || s.ccores % 2 != 0) fail_field("n_ccores", "a positive even count", s.ccores);
  const double pitch = s.rotor_pitch();
  if (!(s.rotor_pole_arc < pitch)) fail_field("beta_r", "< rotor pitch " + std::to_string(pitch), s.rotor_pole_arc);
  if (!(s.wide_tooth_arc < pitch))
    fail_field("beta_s_wide", "< rotor pitch " + std::to_string(pitch), s.wide_tooth_arc);
  if (s.has_pm1() || s.has_pm2()) require_positive("W_PM", s.pm_width);
  if (s.has_pm1()) require_positive("l_PM1", s.pm1_length);
  if (s.has_pm2()) require_positive("l_PM2", s.pm2_length);
  if (s.pm1_length < 0.0) fail_field("l_PM1", ">= 0", s.pm1_length);
  if (s.pm2_length < 0.0) fail_field("l_PM2", ">= 0", s.pm2_length);
  if (s.pm_width < 0.0) fail_field("W_PM", ">= 0", s.pm_width);
  if (!s.lamination) throw ConfigError("invalid motor spec: field 'lamination' is missing");
  require_positive("pm_material.B_r", s.magnet.remanence);
  require_positive("pm_material.H_c", s.magnet.coercivity);
  require_positive("pm_material.mu_rec", s.magnet.recoil_permeability);
  const double br_model = kMu0 * s.magnet.recoil_permeability * s.magnet.coercivity;
  if (std::abs(br_model - s.magnet.remanence) > 0.1 * s.magnet.remanence)
    fail_field("pm_material.B_r", "within 10% of mu0*mu_rec*H_c = " + std::to_string(br_model),
               s.magnet.remanence);
  if (s.phase_resistance < 0.0) fail_field("R_phase", ">= 0", s.phase_resistance);
  if (s.core_loss < 0.0) fail_field("P_core_const", ">= 0", s.core_loss);
  require_positive("active_volume", s.active_volume);
  if (s.fringe_length) require_positive("fringe_length", *s.fringe_length);
  const double bore = bore_diameter(s);
  const double shaft_radius = bore / 2.0 - s.airgap - s.rotor_pole_length - s.rotor_yoke;
  if (!(shaft_radius > 0.0)) fail_field("b_ry", "room for a shaft inside the rotor yoke", s.rotor_yoke);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json lamination_to_json(const BHCurve& c) {
  if (c == BHCurve::m19_24g()) return c.name();
  json pts = json::array();
  for (const auto& p : c.points()) pts.push_back({p.h, p.b});
  return {{"name", c.name()}, {"knee_B", c.knee_b()}, {"points", pts}};
}

std::shared_ptr<const BHCurve> lamination_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "M19-24G") return std::make_shared<const BHCurve>(BHCurve::m19_24g());
    throw ConfigError("unknown lamination '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) throw ConfigError("lamination must be a name or an object");
  std::vector<BHPoint> pts;
  for (const auto& p : j.at("points")) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("lamination points must be [H, B] pairs");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return std::make_shared<const BHCurve>(j.value("name", std::string("custom")), std::move(pts),
                                         j.at("knee_B").get<double>());
}

json magnet_to_json(const PMSpec& m) {
  if (m == PMSpec{}) return m.name;
  return {{"name", m.name}, {"B_r", m.remanence}, {"H_c", m.coercivity}, {"mu_rec", m.recoil_permeability}};
}

PMSpec magnet_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "NdFeB-N35") return PMSpec{};
    throw ConfigError("unknown pm_material '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) throw ConfigError("pm_material must be a name or an object");
  PMSpec m;
  m.name = j.value("name", std::string("custom"));
  m.remanence = j.value("B_r", m.remanence);
  m.coercivity = j.value("H_c", m.coercivity);
  m.recoil_permeability = j.value("mu_rec", m.recoil_permeability);
  return m;
}

const std::vector<std::string>& mandatory_keys() {
  static const std::vector<std::string> keys = {
      "topology_id", "D_o",    "b_sy",      "h_s",     "b_ty",        "h_t",         "l_g",
      "h_r",         "lambda_pole", "beta_s", "beta_s_wide", "a_ext", "beta_r",      "L_stack",
      "W_PM",        "l_PM1",  "l_PM2",     "N_pole",  "N_r",         "n_ccores",    "m_teeth",
      "lamination",  "pm_material", "R_phase", "P_core_const", "active_volume"};
  return keys;
}

const std::set<std::string>& optional_keys() {
  static const std::set<std::string> keys = {"preset", "b_ry", "widened_tooth", "fringe_length"};
  return keys;
}

template <typename T>
void read_number(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number())
    throw ConfigError(std::string("invalid motor spec: field '") + key + "' must be a number");
  out = j[key].get<T>();
}

}  // namespace

MotorSpec load_motor_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("motor spec parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("motor spec must be a JSON object");

  const std::set<std::string> mand(mandatory_keys().begin(), mandatory_keys().end());
  for (const auto& [k, v] : j.items()) {
    if (!mand.count(k) && !optional_keys().count(k))
      throw ConfigError("invalid motor spec: unknown field '" + k + "'");
  }

  MotorSpec s;
  if (j.contains("preset")) {
    s = preset(j["preset"].get<std::string>());
  } else {
    for (const auto& k : mandatory_keys())
      if (!j.contains(k)) throw ConfigError("invalid motor spec: missing field '" + k + "'");
  }

  try {
    if (j.contains("topology_id")) s.topology = parse_topology(j["topology_id"].get<std::string>());
    read_number(j, "D_o", s.outer_diameter);
    read_number(j, "b_sy", s.stator_yoke);
    read_number(j, "h_s", s.pole_height);
    read_number(j, "b_ty", s.tooth_yoke);
    read_number(j, "h_t", s.tooth_length);
    read_number(j, "l_g", s.airgap);
    read_number(j, "h_r", s.rotor_pole_length);
    read_number(j, "lambda_pole", s.pole_arc);
    read_number(j, "beta_s", s.tooth_arc);
    read_number(j, "beta_s_wide", s.wide_tooth_arc);
    read_number(j, "a_ext", s.tooth_extension);
    read_number(j, "beta_r", s.rotor_pole_arc);
    read_number(j, "L_stack", s.stack_length);
    read_number(j, "W_PM", s.pm_width);
    read_number(j, "l_PM1", s.pm1_length);
    read_number(j, "l_PM2", s.pm2_length);
    read_number(j, "N_pole", s.turns_per_pole);
    read_number(j, "N_r", s.rotor_teeth);
    read_number(j, "n_ccores", s.ccores);
    read_number(j, "m_teeth", s.teeth_per_pole);
    read_number(j, "R_phase", s.phase_resistance);
    read_number(j, "P_core_const", s.core_loss);
    read_number(j, "active_volume", s.active_volume);
    read_number(j, "b_ry", s.rotor_yoke);
    if (j.contains("lamination")) s.lamination = lamination_from_json(j["lamination"]);
    if (j.contains("pm_material")) s.magnet = magnet_from_json(j["pm_material"]);
    if (j.contains("widened_tooth")) {
      const auto w = j["widened_tooth"].get<std::string>();
      if (w == "inner") s.widened = WidenedTooth::Inner;
      else if (w == "outer") s.widened = WidenedTooth::Outer;
      else throw ConfigError("invalid motor spec: widened_tooth must be 'inner' or 'outer'");
    }
    if (j.contains("fringe_length")) {
      double f = 0.0;
      read_number(j, "fringe_length", f);
      s.fringe_length = f;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid motor spec: ") + e.what());
  }
  validate(s);
  return s;
}

std::string to_json(const MotorSpec& s) {
  json j = {
      {"topology_id", to_string(s.topology)},
      {"D_o", s.outer_diameter},
      {"b_sy", s.stator_yoke},
      {"h_s", s.pole_height},
      {"b_ty", s.tooth_yoke},
      {"h_t", s.tooth_length},
      {"l_g", s.airgap},
      {"h_r", s.rotor_pole_length},
      {"lambda_pole", s.pole_arc},
      {"beta_s", s.tooth_arc},
      {"beta_s_wide", s.wide_tooth_arc},
      {"a_ext", s.tooth_extension},
      {"beta_r", s.rotor_pole_arc},
      {"L_stack", s.stack_length},
      {"W_PM", s.pm_width},
      {"l_PM1", s.pm1_length},
      {"l_PM2", s.pm2_length},
      {"N_pole", s.turns_per_pole},
      {"N_r", s.rotor_teeth},
      {"n_ccores", s.ccores},
      {"m_teeth", s.teeth_per_pole},
      {"lamination", lamination_to_json(*s.lamination)},
      {"pm_material", magnet_to_json(s.magnet)},
      {"R_phase", s.phase_resistance},
      {"P_core_const", s.core_loss},
      {"active_volume", s.active_volume},
      {"b_ry", s.rotor_yoke},
      {"widened_tooth", to_string(s.widened)},
  };
  if (s.fringe_length) j["fringe_length"] = *s.fringe_length;
  return j.dump();
}

std::string spec_hash(const MotorSpec& s) {
  const std::string text = to_json(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MotorSpec symmetric_variant(const MotorSpec& spec) {
  MotorSpec s = spec;
  s.wide_tooth_arc = s.tooth_arc;
  s.tooth_extension = 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Geometry primitives

double bore_diameter(const MotorSpec& s) {
  const double d =
      s.outer_diameter - 2.0 * (s.stator_yoke + s.pole_height + s.tooth_yoke + s.tooth_length);
  if (!(d > 0.0)) throw ConfigError("inconsistent radial dimensions: bore diameter " + std::to_string(d) + " mm");
  return d;
}

double overlap_arc(double displacement, double tooth_arc, const MotorSpec& s) {
  const double pitch = s.rotor_pitch();
  const double d = displacement - pitch * std::floor((displacement + 0.5 * pitch) / pitch);
  const double reach = 0.5 * (tooth_arc + s.rotor_pole_arc);
  const double cap = std::min(tooth_arc, s.rotor_pole_arc);
  auto one = [&](double x) { return std::clamp(reach - std::abs(x), 0.0, cap); };
  // Symmetric sum so the result is bit-identical for +d and -d.
  return one(d) + (one(d - pitch) + one(d + pitch));
}

double fringing_floor_reluctance(const MotorSpec& s, double tooth_arc) {
  const double path_mm = s.fringe_length.value_or(s.airgap + s.rotor_pole_length);
  const double radius = 0.5e-3 * bore_diameter(s);
  return path_mm * 1e-3 / (kMu0 * radius * deg2rad(tooth_arc) * s.stack_length * 1e-3);
}

double airgap_reluctance(double overlap, const MotorSpec& s, double tooth_arc) {
  const double floor_r = fringing_floor_reluctance(s, tooth_arc);
  if (!(overlap > 0.0)) return floor_r;
  const double radius = 0.5e-3 * bore_diameter(s);
  const double r = s.airgap * 1e-3 / (kMu0 * radius * deg2rad(overlap) * s.stack_length * 1e-3);
  return std::min(r, floor_r);
}

double airgap_reluctance(double overlap, const MotorSpec& s) {
  return airgap_reluctance(overlap, s, s.tooth_arc);
}

IronPaths iron_paths(const MotorSpec& s) {
  const double mm = 1e-3;
  const double r_bore = 0.5 * bore_diameter(s);
  const double len = s.stack_length * mm;
  IronPaths p{};
  const double r_pole = r_bore + s.tooth_length + s.tooth_yoke + 0.5 * s.pole_height;
  p.pole_length = s.pole_height * mm;
  p.pole_area = r_pole * deg2rad(s.pole_arc) * mm * len;
  // The two poles of a C-core sit two rotor pitches apart.
  const double r_yoke = 0.5 * s.outer_diameter - 0.5 * s.stator_yoke;
  p.yoke_length = r_yoke * deg2rad(2.0 * s.rotor_pitch()) * mm;
  p.yoke_area = s.stator_yoke * mm * len;
  // Each tooth sits half a pitch from its pole centre.
  const double r_arm = r_bore + s.tooth_length + 0.5 * s.tooth_yoke;
  p.arm_length = r_arm * deg2rad(s.half_pitch()) * mm;
  p.arm_area = s.tooth_yoke * mm * len;
  p.tooth_length = s.tooth_length * mm;
  p.tooth_area_per_deg = r_bore * deg2rad(1.0) * mm * len;
  p.rotor_pole_length = s.rotor_pole_length * mm;
  p.rotor_pole_area = (r_bore - s.airgap) * deg2rad(s.rotor_pole_arc) * mm * len;
  const double r_ry = r_bore - s.airgap - s.rotor_pole_length - 0.5 * s.rotor_yoke;
  p.rotor_yoke_length = r_ry * deg2rad(2.0 * s.rotor_pitch()) * mm;
  p.rotor_yoke_area = s.rotor_yoke * mm * len;
  return p;
}

MagnetSource magnet_source(const MotorSpec& s, double length_mm) {
  const double l = length_mm * 1e-3;
  const double area = s.pm_width * 1e-3 * s.stack_length * 1e-3;
  return {s.magnet.coercivity * l, l / (kMu0 * s.magnet.recoil_permeability * area)};
}

}  // namespace srm
