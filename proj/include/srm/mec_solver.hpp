#pragma once

#include <algorithm>
#include <cmath>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "srm/config_geometry.hpp"

namespace srm {

enum class Mode { Linear, Saturable };
enum class Phase { A, B };
// Full: tooth-level nodes with Thevenin magnets. Simplified: one node per pole
// tip with magnets as ideal flux sources, the form the closed-form fluxes assume.
enum class NetworkForm { Full, Simplified };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);
std::string to_string(Phase p);

enum class SourceKind { Winding, Pm1, Pm2 };

struct LinearReluctance {
  double reluctance;  // A/Wb
};

struct SaturableReluctance {
  double path_length;  // m
  double area;         // m^2
};

using Segment = std::variant<LinearReluctance, SaturableReluctance>;

// A series chain of segments plus an MMF source driving flux from `from` to `to`.
struct Branch {
  int from = 0;
  int to = 0;
  std::vector<Segment> segments;
  double mmf = 0.0;
  SourceKind kind = SourceKind::Winding;
  std::string label;
};

// Ideal flux source: pushes `flux` out of node `from` into node `to`.
struct FluxSource {
  int from = 0;
  int to = 0;
  double flux = 0.0;
  SourceKind kind = SourceKind::Pm1;
  std::string label;
};

struct OperatingPoint {
  double theta = 0.0;  // mech deg
  double current = 0.0;
  Phase phase = Phase::A;
};

// Lumped per-C-core quantities of the network, named after the symbols of
// the closed-form loop solution.
struct LumpedReluctances {
  double stator_yoke = 0, stator_pole = 0, rotor_yoke = 0, gap = 0;
  double pm1 = 0, pm2 = 0;            // internal magnet reluctances (0 when absent)
  double winding_mmf = 0;             // per pole
  double pm1_mmf = 0, pm2_mmf = 0;
  double r_star() const { return 2 * gap + rotor_yoke + 2 * stator_pole + stator_yoke; }
};

struct MecNetwork {
  int node_count = 0;
  std::vector<Branch> branches;
  std::vector<FluxSource> flux_sources;
  Mode mode = Mode::Saturable;
  NetworkForm form = NetworkForm::Full;
  OperatingPoint op;
  std::shared_ptr<const BHCurve> curve;
  double linear_permeability = 0.0;  // used by saturable segments in linear mode

  // Branch roles.
  int stator_yoke = -1;
  int stator_pole = -1;
  int rotor_yoke = -1;
  std::vector<int> gap_branches;  // teeth under the first pole
  int pm1_branch = -1, pm2_branch = -1;    // full form
  int pm1_source = -1, pm2_source = -1;    // simplified form

  // Linear-mode lumped values, filled by build_network.
  LumpedReluctances lumped;
};

// pm_scale multiplies every magnet source (1 = nominal).
MecNetwork build_network(const MotorSpec& spec, double theta, double current, Phase phase, Mode mode,
                         NetworkForm form = NetworkForm::Full, double pm_scale = 1.0);

struct Contributions {
  double winding = 0, pm1 = 0, pm2 = 0;
  double sum() const { return winding + pm1 + pm2; }
  // Deviation of `total` from the sum of terms, relative to the term magnitudes.
  double split_error(double total) const {
    const double scale = std::max(std::abs(winding) + std::abs(pm1) + std::abs(pm2), std::abs(total));
    return scale > 0.0 ? std::abs(sum() - total) / scale : 0.0;
  }
};

struct FluxSolution {
  double phi_sy = 0, phi_sp = 0, phi_ry = 0, phi_g = 0, phi_pm1 = 0, phi_pm2 = 0;
  Contributions sy, sp, ry, g;
  double r_star = 0;
  int iterations = 0;
  double residual = 0;  // max node imbalance over max branch flux
  std::vector<double> branch_flux;
  std::vector<double> potentials;
  std::vector<double> branch_reluctance;  // secant value at the solution
};

struct SolverOptions {
  double tolerance = 1e-6;  // 0 refines to the round-off floor
  int max_iterations = 200;
};

// Damped Newton on node potentials. Warm start from `guess` when it matches.
FluxSolution solve_network(const MecNetwork& net, const SolverOptions& opt = {},
                           const std::vector<double>* guess = nullptr);

FluxSolution solve_closed_form(const MotorSpec& spec, double theta, double current, Mode mode,
                               Phase phase = Phase::A);

struct DominanceRatio {
  std::string name;
  double value;
};

struct DominanceReport {
  std::vector<DominanceRatio> ratios;
  double threshold = 10.0;
  bool pass = true;
};

DominanceReport check_dominance(const LumpedReluctances& r, bool pm1, bool pm2, double threshold = 10.0);
DominanceReport check_dominance(const MecNetwork& net);

double turns_per_phase_loop(const MotorSpec& spec);  // (n_ccores/2) * 2 * N_pole
double flux_linkage(const MotorSpec& spec, double theta, double current, Phase phase, Mode mode);

// Same as flux_linkage, also returning the solved state for warm starts.
struct LinkageResult {
  double lambda;
  FluxSolution solution;
};
LinkageResult flux_linkage_detail(const MotorSpec& spec, double theta, double current, Phase phase,
                                  Mode mode, const std::vector<double>* guess = nullptr,
                                  double pm_scale = 1.0);

std::string network_to_json(const MecNetwork& net, const FluxSolution* sol);

}  // namespace srm
