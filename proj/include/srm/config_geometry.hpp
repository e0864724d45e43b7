#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srm {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0e-7 * kPi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

enum class Topology { Motor1, Motor2, Motor3, Motor4 };

std::string to_string(Topology t);
Topology parse_topology(std::string_view s);

// Which tooth of each pole carries the extension.
enum class WidenedTooth { Inner, Outer };

std::string to_string(WidenedTooth w);

struct BHPoint {
  double h;  // A/m
  double b;  // T
};

// Piecewise-linear single-valued magnetization curve. Odd extension for
// negative flux density, slope mu0 beyond the last tabulated point.
class BHCurve {
 public:
  BHCurve(std::string name, std::vector<BHPoint> points, double knee_b);

  static BHCurve m19_24g();

  const std::string& name() const { return name_; }
  const std::vector<BHPoint>& points() const { return points_; }
  double knee_b() const { return knee_b_; }

  double field(double b) const;        // H(B)
  double field_slope(double b) const;  // dH/dB
  double flux_density(double h) const; // B(H)
  double initial_permeability() const;

  bool operator==(const BHCurve& o) const;

 private:
  std::string name_;
  std::vector<BHPoint> points_;
  double knee_b_;
};

struct PMSpec {
  std::string name = "NdFeB-N35";
  double remanence = 1.20;        // T
  double coercivity = 900e3;      // A/m
  double recoil_permeability = 1.05;

  bool operator==(const PMSpec&) const = default;
};

// Lengths in mm, arcs in mechanical degrees unless noted.
struct MotorSpec {
  Topology topology = Topology::Motor1;
  double outer_diameter = 94.0;
  double stator_yoke = 4.6;
  double pole_height = 10.8;
  double tooth_yoke = 3.2;
  double tooth_length = 2.8;
  double airgap = 0.3;
  double rotor_pole_length = 4.64;
  double pole_arc = 10.0;
  double tooth_arc = 8.4;
  double wide_tooth_arc = 11.9;
  double tooth_extension = 3.5;
  double rotor_pole_arc = 8.8;
  double stack_length = 20.0;
  double pm_width = 0.0;
  double pm1_length = 0.0;
  double pm2_length = 0.0;
  int turns_per_pole = 90;
  int rotor_teeth = 18;
  int ccores = 4;
  int teeth_per_pole = 2;
  std::shared_ptr<const BHCurve> lamination = std::make_shared<const BHCurve>(BHCurve::m19_24g());
  PMSpec magnet;
  double phase_resistance = 0.218;  // ohm
  double core_loss = 0.9;           // W
  double active_volume = 0.320;     // L

  // Not tabulated for the prototypes; see README.
  double rotor_yoke = 10.0;
  WidenedTooth widened = WidenedTooth::Outer;
  // Air path length of the unaligned permeance floor; defaults to airgap + rotor_pole_length.
  std::optional<double> fringe_length;

  bool has_pm1() const { return topology == Topology::Motor2 || topology == Topology::Motor4; }
  bool has_pm2() const { return topology == Topology::Motor3 || topology == Topology::Motor4; }
  double rotor_pitch() const { return 360.0 / rotor_teeth; }
  double half_pitch() const { return 180.0 / rotor_teeth; }

  bool operator==(const MotorSpec& o) const;
};

MotorSpec preset(std::string_view name);
std::vector<std::string> preset_names();

MotorSpec load_motor_spec(std::string_view json_text);
std::string to_json(const MotorSpec& spec);
void validate(const MotorSpec& spec);

// 16 hex digits of FNV-1a over the canonical JSON.
std::string spec_hash(const MotorSpec& spec);

// Same motor with both teeth of each pole at the narrow arc.
MotorSpec symmetric_variant(const MotorSpec& spec);

// Bore: outer diameter minus the radial stack of yoke, pole, tooth yoke and tooth.
double bore_diameter(const MotorSpec& spec);

// Overlap (deg) of a tooth with the rotor poles. displacement is tooth centre
// minus rotor pole centre; it is reduced into one pitch and the two neighbouring
// rotor poles are included, which matters once tooth_arc + beta_r > pitch.
double overlap_arc(double displacement, double tooth_arc, const MotorSpec& spec);

// Air-gap reluctance (A/Wb) of one tooth; capped by the fringing floor of that tooth.
double airgap_reluctance(double overlap, const MotorSpec& spec, double tooth_arc);
double airgap_reluctance(double overlap, const MotorSpec& spec);
double fringing_floor_reluctance(const MotorSpec& spec, double tooth_arc);

// Mean-path iron geometry in SI units (m, m^2).
struct IronPaths {
  double pole_length, pole_area;
  double yoke_length, yoke_area;
  double arm_length, arm_area;
  double tooth_length;
  double rotor_pole_length, rotor_pole_area;
  double rotor_yoke_length, rotor_yoke_area;
  double tooth_area(double arc_deg) const { return tooth_area_per_deg * arc_deg; }
  double tooth_area_per_deg;
};

IronPaths iron_paths(const MotorSpec& spec);

struct MagnetSource {
  double mmf;         // A-turns
  double reluctance;  // A/Wb
};

MagnetSource magnet_source(const MotorSpec& spec, double length_mm);

}  // namespace srm
