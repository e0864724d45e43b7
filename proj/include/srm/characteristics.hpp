#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srm/config_geometry.hpp"
#include "srm/mec_solver.hpp"

namespace srm {

struct TorqueOptions {
  int current_steps = 60;   // trapezoid panels of the co-energy integral
  double delta_deg = 0.05;  // half-width of the angular central difference
  // Adds the magnets' own co-energy (the cogging term) to the winding co-energy.
  bool magnet_coenergy = false;
  int magnet_steps = 20;
};

// W'(theta, i) = integral of lambda over current at fixed angle, in joules.
double coenergy(const MotorSpec& spec, double theta, double current, Mode mode, int steps,
                Phase phase = Phase::A);

// Co-energy stored by the magnets alone at zero current, per phase, in joules.
double magnet_coenergy(const MotorSpec& spec, double theta, Mode mode, int steps, Phase phase = Phase::A);

double static_torque(const MotorSpec& spec, double theta, double current, Mode mode,
                     const TorqueOptions& opt = {});

// Idealized rising-overlap torque of one phase with gap-dominated reluctance.
double analytic_torque_linear(const MotorSpec& spec, double current);

struct TorqueAngleCurve {
  std::vector<double> angles;  // mech deg, 0..pitch inclusive
  std::vector<double> torque;  // N*m
  double current = 0.0;
  Topology topology = Topology::Motor1;
  Mode mode = Mode::Saturable;
  double grid_step = 0.1;
  double delta_deg = 0.05;
  int current_steps = 60;
  std::string spec_hash;

  double period() const { return angles.back() - angles.front(); }
  double peak() const;
  // Linear interpolation, periodic in angle.
  double at(double theta) const;
};

std::vector<TorqueAngleCurve> torque_angle_curve(const MotorSpec& spec, const std::vector<double>& currents,
                                                 Mode mode, double grid_step = 0.1,
                                                 const TorqueOptions& opt = {}, int threads = 1);

// Trapezoid integral of torque over one period, N*m*rad.
double net_work(const TorqueAngleCurve& curve);

struct CommutationAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double theta_on = 0.0;
  double theta_off = 0.0;
  double aligned_angle = 0.0;    // effective aligned position (torque falls through zero)
  double unaligned_angle = 0.0;  // effective unaligned position (torque rises through zero)
  double nominal_aligned = 0.0;  // geometric aligned position anchoring beta
  double pitch = 20.0;
  bool self_starting = true;
  std::vector<std::string> warnings;
};

// Conduction width from alpha and beta: half pitch + alpha - beta.
CommutationAngles commutation_from_alpha_beta(double alpha, double beta, double pitch);

struct ZeroCrossings {
  std::vector<double> down;  // positive to negative
  std::vector<double> up;    // negative to positive
};

ZeroCrossings find_zero_crossings(const TorqueAngleCurve& curve, double threshold_fraction = 0.01);

// Positive lobe with the largest area, as (rise, fall) crossing angles.
std::pair<double, double> main_positive_lobe(const TorqueAngleCurve& curve, double threshold_fraction = 0.01);

// nominal_aligned defaults to the angle origin, the geometric aligned position
// of the narrow tooth.
CommutationAngles extract_commutation_angles(const TorqueAngleCurve& curve, double phase_shift,
                                             std::optional<double> nominal_aligned = std::nullopt);

// Runs the extraction on the motor and on its symmetric-tooth variant, which
// supplies the nominal aligned anchor.
CommutationAngles derive_commutation(const MotorSpec& spec, double current, Mode mode, double grid_step = 0.1,
                                     int threads = 1);

// Length of the main positive-torque lobe, mech deg.
double positive_span(const TorqueAngleCurve& curve);

}  // namespace srm
