#include "srm/mec_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "srm/error.hpp"

namespace srm {

std::string to_string(Mode m) { return m == Mode::Linear ? "linear" : "saturable"; }

Mode parse_mode(const std::string& s) {
  if (s == "linear") return Mode::Linear;
  if (s == "saturable") return Mode::Saturable;
  throw ConfigError("unknown mode '" + s + "' (expected linear or saturable)");
}

std::string to_string(Phase p) { return p == Phase::A ? "A" : "B"; }

// ---------------------------------------------------------------------------
// Network construction

namespace {

struct ToothGeometry {
  double arc;
  double displacement;
};

// Narrow and widened tooth of one pole, in (inner, outer) order. The widened
// tooth extends toward the approaching rotor pole, so its centre leads by a/2.
std::pair<ToothGeometry, ToothGeometry> pole_teeth(const MotorSpec& s, double theta) {
  const ToothGeometry narrow{s.tooth_arc, theta};
  const ToothGeometry wide{s.wide_tooth_arc, theta + 0.5 * s.tooth_extension};
  if (s.widened == WidenedTooth::Inner) return {wide, narrow};
  return {narrow, wide};
}

double parallel(double a, double b) { return a * b / (a + b); }

}  // namespace

MecNetwork build_network(const MotorSpec& spec, double theta, double current, Phase phase, Mode mode,
                         NetworkForm form, double pm_scale) {
  if (phase != Phase::A && phase != Phase::B) throw ConfigError("invalid phase id");
  const double th = phase == Phase::A ? theta : theta - spec.half_pitch();
  const IronPaths p = iron_paths(spec);

  MecNetwork net;
  net.mode = mode;
  net.form = form;
  net.op = {theta, current, phase};
  net.curve = spec.lamination;
  net.linear_permeability = spec.lamination->initial_permeability();
  const double mu_lin = net.linear_permeability;

  const double fe = spec.turns_per_pole * current;
  const auto [inner, outer] = pole_teeth(spec, th);

  auto iron = [](double l, double a) -> Segment { return SaturableReluctance{l, a}; };
  auto gap_chain = [&](const ToothGeometry& t) {
    const double ov = overlap_arc(t.displacement, t.arc, spec);
    return std::vector<Segment>{iron(p.tooth_length, p.tooth_area(t.arc)),
                                LinearReluctance{airgap_reluctance(ov, spec, t.arc)},
                                iron(p.rotor_pole_length, p.rotor_pole_area)};
  };
  auto add = [&](int a, int b, std::vector<Segment> segs, double mmf, SourceKind kind, std::string label) {
    net.branches.push_back({a, b, std::move(segs), mmf, kind, std::move(label)});
    return static_cast<int>(net.branches.size()) - 1;
  };

  const MagnetSource pm1 = spec.has_pm1() ? magnet_source(spec, spec.pm1_length) : MagnetSource{0, 0};
  const MagnetSource pm2 = spec.has_pm2() ? magnet_source(spec, spec.pm2_length) : MagnetSource{0, 0};
  const std::vector<Segment> arm{iron(p.arm_length, p.arm_area)};

  if (form == NetworkForm::Full) {
    // 0 pole-1 root, 1 pole-1 junction, 2/3 inner/outer tooth of pole 1,
    // 4/5 rotor under pole 1/2, 6/7 inner/outer tooth of pole 2,
    // 8 pole-2 junction, 9 pole-2 root.
    net.node_count = 10;
    net.stator_pole = add(0, 1, {iron(p.pole_length, p.pole_area)}, fe, SourceKind::Winding, "pole1");
    add(1, 2, arm, 0, SourceKind::Winding, "arm_inner1");
    add(1, 3, arm, 0, SourceKind::Winding, "arm_outer1");
    net.gap_branches.push_back(add(2, 4, gap_chain(inner), 0, SourceKind::Winding, "gap_inner1"));
    net.gap_branches.push_back(add(3, 4, gap_chain(outer), 0, SourceKind::Winding, "gap_outer1"));
    net.rotor_yoke = add(4, 5, {iron(p.rotor_yoke_length, p.rotor_yoke_area)}, 0, SourceKind::Winding,
                         "rotor_yoke");
    add(5, 6, gap_chain(inner), 0, SourceKind::Winding, "gap_inner2");
    add(5, 7, gap_chain(outer), 0, SourceKind::Winding, "gap_outer2");
    add(6, 8, arm, 0, SourceKind::Winding, "arm_inner2");
    add(7, 8, arm, 0, SourceKind::Winding, "arm_outer2");
    add(8, 9, {iron(p.pole_length, p.pole_area)}, fe, SourceKind::Winding, "pole2");
    net.stator_yoke = add(9, 0, {iron(p.yoke_length, p.yoke_area)}, 0, SourceKind::Winding, "stator_yoke");
    // Set 1 bridges the inner teeth of the C-core. Set 2 bridges the outer teeth
    // of neighbouring C-cores; by symmetry it folds into one source of twice the
    // magnet MMF behind twice its reluctance.
    if (spec.has_pm1())
      net.pm1_branch = add(6, 2, {LinearReluctance{pm1.reluctance}}, pm_scale * pm1.mmf, SourceKind::Pm1, "pm1");
    if (spec.has_pm2())
      net.pm2_branch =
          add(7, 3, {LinearReluctance{2 * pm2.reluctance}}, pm_scale * 2 * pm2.mmf, SourceKind::Pm2, "pm2");
  } else {
    // 0 pole-1 root, 1 pole-1 tip, 2/3 rotor under pole 1/2, 4 pole-2 tip, 5 pole-2 root.
    net.node_count = 6;
    auto tooth_chain = [&](const ToothGeometry& t) {
      auto segs = gap_chain(t);
      segs.insert(segs.begin(), arm.front());
      return segs;
    };
    net.stator_pole = add(0, 1, {iron(p.pole_length, p.pole_area)}, fe, SourceKind::Winding, "pole1");
    net.gap_branches.push_back(add(1, 2, tooth_chain(inner), 0, SourceKind::Winding, "tooth_inner1"));
    net.gap_branches.push_back(add(1, 2, tooth_chain(outer), 0, SourceKind::Winding, "tooth_outer1"));
    net.rotor_yoke = add(2, 3, {iron(p.rotor_yoke_length, p.rotor_yoke_area)}, 0, SourceKind::Winding,
                         "rotor_yoke");
    add(3, 4, tooth_chain(inner), 0, SourceKind::Winding, "tooth_inner2");
    add(3, 4, tooth_chain(outer), 0, SourceKind::Winding, "tooth_outer2");
    add(4, 5, {iron(p.pole_length, p.pole_area)}, fe, SourceKind::Winding, "pole2");
    net.stator_yoke = add(5, 0, {iron(p.yoke_length, p.yoke_area)}, 0, SourceKind::Winding, "stator_yoke");
    if (spec.has_pm1()) {
      net.flux_sources.push_back({4, 1, pm_scale * pm1.mmf / pm1.reluctance, SourceKind::Pm1, "pm1"});
      net.pm1_source = static_cast<int>(net.flux_sources.size()) - 1;
    }
    if (spec.has_pm2()) {
      net.flux_sources.push_back({4, 1, pm_scale * pm2.mmf / pm2.reluctance, SourceKind::Pm2, "pm2"});
      net.pm2_source = static_cast<int>(net.flux_sources.size()) - 1;
    }
  }

  // Lumped linear values for the closed form and the dominance ratios.
  auto lin = [&](double l, double a) { return l / (mu_lin * a); };
  auto tooth_lin = [&](const ToothGeometry& t) {
    const double ov = overlap_arc(t.displacement, t.arc, spec);
    return lin(p.arm_length, p.arm_area) + lin(p.tooth_length, p.tooth_area(t.arc)) +
           airgap_reluctance(ov, spec, t.arc) + lin(p.rotor_pole_length, p.rotor_pole_area);
  };
  LumpedReluctances& L = net.lumped;
  L.stator_pole = lin(p.pole_length, p.pole_area);
  L.stator_yoke = lin(p.yoke_length, p.yoke_area);
  L.rotor_yoke = lin(p.rotor_yoke_length, p.rotor_yoke_area);
  L.gap = parallel(tooth_lin(inner), tooth_lin(outer));
  L.winding_mmf = fe;
  L.pm1 = pm1.reluctance;
  L.pm2 = pm2.reluctance;
  L.pm1_mmf = pm_scale * pm1.mmf;
  L.pm2_mmf = pm_scale * pm2.mmf;
  return net;
}

// ---------------------------------------------------------------------------
// Nonlinear nodal solve

namespace {

// Magnetic drop g(phi) of a branch and its slope, excluding the source.
class BranchLaw {
 public:
  BranchLaw(const Branch& b, const MecNetwork& net) {
    for (const auto& seg : b.segments) {
      if (const auto* l = std::get_if<LinearReluctance>(&seg)) {
        r_lin_ += l->reluctance;
      } else {
        const auto& s = std::get<SaturableReluctance>(seg);
        if (net.mode == Mode::Linear) {
          r_lin_ += s.path_length / (net.linear_permeability * s.area);
        } else {
          iron_.push_back({s.path_length, s.area});
        }
      }
    }
    curve_ = net.curve.get();
  }

  bool linear() const { return iron_.empty(); }

  double drop(double phi) const {
    double g = r_lin_ * phi;
    for (const auto& [l, a] : iron_) g += l * curve_->field(phi / a);
    return g;
  }

  double slope(double phi) const {
    double d = r_lin_;
    for (const auto& [l, a] : iron_) d += l / a * curve_->field_slope(phi / a);
    return d;
  }

  // Flux such that drop(phi) == m, bracketed by the extreme secant permeabilities.
  double invert(double m, double guess, double mu_max) const {
    if (linear()) return m / r_lin_;
    if (m == 0.0) return 0.0;
    double r_lo = r_lin_, r_hi = r_lin_;
    for (const auto& [l, a] : iron_) {
      r_lo += l / (mu_max * a);
      r_hi += l / (kMu0 * a);
    }
    double lo = m / r_hi, hi = m / r_lo;
    if (lo > hi) std::swap(lo, hi);
    double phi = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    const double ftol = 1e-14 * std::abs(m);
    for (int k = 0; k < 200; ++k) {
      const double f = drop(phi) - m;
      if (std::abs(f) <= ftol) break;
      if (f > 0) hi = phi;
      else lo = phi;
      const double next = phi - f / slope(phi);
      phi = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
      if (hi - lo <= 1e-15 * std::abs(hi)) break;
    }
    return phi;
  }

  double secant(double phi) const {
    if (std::abs(phi) < 1e-300) return slope(0.0);
    return drop(phi) / phi;
  }

 private:
  double r_lin_ = 0.0;
  std::vector<std::pair<double, double>> iron_;
  const BHCurve* curve_ = nullptr;
};

double max_secant_permeability(const BHCurve& c) {
  double mu = 0.0;
  for (size_t k = 1; k < c.points().size(); ++k) mu = std::max(mu, c.points()[k].b / c.points()[k].h);
  return mu;
}

void check_connected(const MecNetwork& net) {
  std::vector<int> seen(net.node_count, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (const auto& b : net.branches) {
      int other = -1;
      if (b.from == n) other = b.to;
      else if (b.to == n) other = b.from;
      if (other >= 0 && !seen[other]) {
        seen[other] = 1;
        stack.push_back(other);
      }
    }
  }
  for (int v : seen)
    if (!v) throw NumericalError("disconnected or degenerate network");
}

// Potentials and node sums are carried in extended precision so that small
// branch fluxes that are differences of large potentials keep their digits.
using Potentials = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct State {
  std::vector<double> flux;
  std::vector<double> conductance;  // dphi/dU
  Eigen::VectorXd residual;         // node imbalance, node 0 included
};

void evaluate(const MecNetwork& net, const std::vector<BranchLaw>& laws, double mu_max,
              const Potentials& u, State& st) {
  const int nb = static_cast<int>(net.branches.size());
  st.flux.resize(nb);
  st.conductance.resize(nb);
  Potentials acc = Potentials::Zero(net.node_count);
  for (int k = 0; k < nb; ++k) {
    const Branch& b = net.branches[k];
    const double m = static_cast<double>(u[b.from] - u[b.to] + b.mmf);
    const double phi = laws[k].invert(m, st.flux[k], mu_max);
    st.flux[k] = phi;
    st.conductance[k] = 1.0 / laws[k].slope(phi);
    acc[b.from] += phi;
    acc[b.to] -= phi;
  }
  for (const auto& s : net.flux_sources) {
    acc[s.from] += s.flux;
    acc[s.to] -= s.flux;
  }
  st.residual = acc.cast<double>();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double relative_residual(const State& st) {
  const double scale = max_abs(st.flux);
  const double r = st.residual.cwiseAbs().maxCoeff();
  if (scale == 0.0) return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r / scale;
}

// Linear solve with fixed branch reluctances and a chosen subset of sources.
std::vector<double> linear_branch_flux(const MecNetwork& net, const std::vector<double>& reluctance,
                                       const Eigen::LDLT<Eigen::MatrixXd>& factor, SourceKind kind) {
  const int n = net.node_count;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& b = net.branches[k];
    if (b.mmf == 0.0 || b.kind != kind) continue;
    const double q = b.mmf / reluctance[k];
    rhs[b.from] -= q;
    rhs[b.to] += q;
  }
  for (const auto& s : net.flux_sources) {
    if (s.kind != kind) continue;
    rhs[s.from] -= s.flux;
    rhs[s.to] += s.flux;
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.tail(n - 1) = factor.solve(rhs.tail(n - 1));
  std::vector<double> flux(net.branches.size());
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& b = net.branches[k];
    const double mmf = b.kind == kind ? b.mmf : 0.0;
    flux[k] = (u[b.from] - u[b.to] + mmf) / reluctance[k];
  }
  return flux;
}

}  // namespace

FluxSolution solve_network(const MecNetwork& net, const SolverOptions& opt, const std::vector<double>* guess) {
  if (net.node_count < 2 || net.branches.empty()) throw NumericalError("disconnected or degenerate network");
  check_connected(net);
  for (const auto& b : net.branches) {
    if (b.segments.empty()) throw NumericalError("disconnected or degenerate network: empty branch " + b.label);
  }

  const int n = net.node_count;
  const int nb = static_cast<int>(net.branches.size());
  std::vector<BranchLaw> laws;
  laws.reserve(nb);
  for (const auto& b : net.branches) laws.emplace_back(b, net);
  const double mu_max = max_secant_permeability(*net.curve);

  Potentials u = Potentials::Zero(n);
  if (guess && static_cast<int>(guess->size()) == n)
    for (int i = 1; i < n; ++i) u[i] = (*guess)[i];

  State st;
  st.flux.assign(nb, 0.0);
  evaluate(net, laws, mu_max, u, st);

  Eigen::MatrixXd jac(n - 1, n - 1);
  int iter = 0;
  bool converged = relative_residual(st) <= std::min(1e-12, opt.tolerance) || st.residual.cwiseAbs().maxCoeff() == 0.0;
  double last_change = 0.0;
  while (!converged) {
    if (iter >= opt.max_iterations) {
      std::ostringstream os;
      os << "MEC solve did not converge after " << iter << " iterations (residual "
         << relative_residual(st) << ", last flux change " << last_change << ")";
      throw NumericalError(os.str());
    }
    ++iter;
    jac.setZero();
    for (int k = 0; k < nb; ++k) {
      const Branch& b = net.branches[k];
      const double c = st.conductance[k];
      const int a = b.from - 1, z = b.to - 1;
      if (a >= 0) jac(a, a) += c;
      if (z >= 0) jac(z, z) += c;
      if (a >= 0 && z >= 0) {
        jac(a, z) -= c;
        jac(z, a) -= c;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(jac);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
      throw NumericalError("disconnected or degenerate network");
    const Eigen::VectorXd step = ldlt.solve(-st.residual.tail(n - 1));

    const double r0 = st.residual.tail(n - 1).norm();
    const double res_before = relative_residual(st);
    const std::vector<double> flux_before = st.flux;
    double t = 1.0;
    State trial;
    for (int halvings = 0;; ++halvings) {
      Potentials ut = u;
      ut.tail(n - 1) += (t * step).cast<long double>();
      trial.flux = st.flux;
      evaluate(net, laws, mu_max, ut, trial);
      if (trial.residual.tail(n - 1).norm() <= (1.0 - 1e-4 * t) * r0 || halvings >= 30) {
        u = ut;
        st = std::move(trial);
        break;
      }
      t *= 0.5;
    }

    double change = 0.0;
    for (int k = 0; k < nb; ++k) change = std::max(change, std::abs(st.flux[k] - flux_before[k]));
    const double scale = max_abs(st.flux);
    last_change = scale > 0.0 ? change / scale : change;
    const double res = relative_residual(st);
    // Below 1e-10 keep refining while the residual still halves; a stalled
    // residual means the round-off floor is reached.
    const bool stalled = res <= 1e-10 && res > 0.5 * res_before;
    converged = res <= std::min(1e-10, opt.tolerance) || (last_change < opt.tolerance && res <= opt.tolerance) ||
                stalled;
  }

  FluxSolution sol;
  sol.iterations = iter;
  sol.residual = relative_residual(st);
  sol.branch_flux = st.flux;
  sol.potentials.resize(n);
  for (int i = 0; i < n; ++i) sol.potentials[i] = static_cast<double>(u[i]);
  sol.branch_reluctance.resize(nb);
  for (int k = 0; k < nb; ++k) sol.branch_reluctance[k] = laws[k].secant(st.flux[k]);

  sol.phi_sy = st.flux[net.stator_yoke];
  sol.phi_sp = st.flux[net.stator_pole];
  sol.phi_ry = st.flux[net.rotor_yoke];
  for (int g : net.gap_branches) sol.phi_g += st.flux[g];
  if (net.pm1_branch >= 0) sol.phi_pm1 = st.flux[net.pm1_branch];
  if (net.pm2_branch >= 0) sol.phi_pm2 = st.flux[net.pm2_branch];
  if (net.pm1_source >= 0) sol.phi_pm1 = net.flux_sources[net.pm1_source].flux;
  if (net.pm2_source >= 0) sol.phi_pm2 = net.flux_sources[net.pm2_source].flux;

  // Lumped reluctances at the operating point (secant values).
  const auto& R = sol.branch_reluctance;
  double gap_conductance = 0.0;
  for (int g : net.gap_branches) {
    double chain = R[g];
    if (net.form == NetworkForm::Full) {
      // Each tooth gap is fed through its own arm.
      for (int k = 0; k < nb; ++k)
        if (net.branches[k].to == net.branches[g].from && net.branches[k].from == net.branches[net.stator_pole].to)
          chain += R[k];
    }
    gap_conductance += 1.0 / chain;
  }
  sol.r_star = 2.0 / gap_conductance + R[net.rotor_yoke] + 2.0 * R[net.stator_pole] + R[net.stator_yoke];

  // Source-by-source split on the frozen secant reluctances; exact superposition
  // in linear mode, frozen-permeability split otherwise.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (int k = 0; k < nb; ++k) {
    const Branch& b = net.branches[k];
    const double c = 1.0 / R[k];
    const int a = b.from - 1, z = b.to - 1;
    if (a >= 0) lap(a, a) += c;
    if (z >= 0) lap(z, z) += c;
    if (a >= 0 && z >= 0) {
      lap(a, z) -= c;
      lap(z, a) -= c;
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> factor(lap);
  auto fill = [&](SourceKind kind, double Contributions::*field) {
    const auto f = linear_branch_flux(net, R, factor, kind);
    sol.sy.*field = f[net.stator_yoke];
    sol.sp.*field = f[net.stator_pole];
    sol.ry.*field = f[net.rotor_yoke];
    double g = 0.0;
    for (int k : net.gap_branches) g += f[k];
    sol.g.*field = g;
  };
  fill(SourceKind::Winding, &Contributions::winding);
  fill(SourceKind::Pm1, &Contributions::pm1);
  fill(SourceKind::Pm2, &Contributions::pm2);
  return sol;
}

// ---------------------------------------------------------------------------
// Closed form

FluxSolution solve_closed_form(const MotorSpec& spec, double theta, double current, Mode mode, Phase phase) {
  if (mode != Mode::Linear) throw ConfigError("closed-form fluxes are defined for linear mode only");
  const MecNetwork net = build_network(spec, theta, current, phase, Mode::Linear, NetworkForm::Simplified);
  const LumpedReluctances& L = net.lumped;
  const double rs = 2 * L.stator_pole + L.stator_yoke;
  const double rr = 2 * L.gap + L.rotor_yoke;
  const double rstar = L.r_star();
  const double q1 = spec.has_pm1() ? L.pm1_mmf / L.pm1 : 0.0;
  const double q2 = spec.has_pm2() ? L.pm2_mmf / L.pm2 : 0.0;

  FluxSolution sol;
  sol.r_star = rstar;
  sol.sy = {2 * L.winding_mmf / rstar, -rr * q1 / rstar, -rr * q2 / rstar};
  sol.sp = sol.sy;
  sol.g = {2 * L.winding_mmf / rstar, rs * q1 / rstar, rs * q2 / rstar};
  sol.ry = sol.g;
  sol.phi_sy = sol.sy.sum();
  sol.phi_sp = sol.sp.sum();
  sol.phi_g = sol.g.sum();
  sol.phi_ry = sol.ry.sum();
  sol.phi_pm1 = q1;
  sol.phi_pm2 = q2;
  sol.iterations = 0;
  sol.residual = 0.0;
  return sol;
}

// ---------------------------------------------------------------------------
// Dominance

DominanceReport check_dominance(const LumpedReluctances& r, bool pm1, bool pm2, double threshold) {
  DominanceReport rep;
  rep.threshold = threshold;
  const double rs = 2 * r.stator_pole + r.stator_yoke;
  const double rr = 2 * r.gap + r.rotor_yoke;
  const double rp = rs * rr / (rs + rr);
  auto add = [&](const std::string& pm, double rpm) {
    rep.ratios.push_back({"R_" + pm + "/(2R_sp+R_sy)", rpm / rs});
    rep.ratios.push_back({"R_" + pm + "/(2R_g+R_ry)", rpm / rr});
    rep.ratios.push_back({"R_" + pm + "/((2R_sp+R_sy)||(2R_g+R_ry))", rpm / rp});
  };
  if (pm1) add("PM1", r.pm1);
  if (pm2) add("PM2", r.pm2);
  for (const auto& x : rep.ratios)
    if (!(x.value >= threshold)) rep.pass = false;
  return rep;
}

DominanceReport check_dominance(const MecNetwork& net) {
  const bool pm1 = net.pm1_branch >= 0 || net.pm1_source >= 0;
  const bool pm2 = net.pm2_branch >= 0 || net.pm2_source >= 0;
  return check_dominance(net.lumped, pm1, pm2);
}

// ---------------------------------------------------------------------------
// Flux linkage

double turns_per_phase_loop(const MotorSpec& spec) {
  return (spec.ccores / 2) * 2.0 * spec.turns_per_pole;
}

LinkageResult flux_linkage_detail(const MotorSpec& spec, double theta, double current, Phase phase, Mode mode,
                                  const std::vector<double>* guess, double pm_scale) {
  const MecNetwork net = build_network(spec, theta, current, phase, mode, NetworkForm::Full, pm_scale);
  FluxSolution sol = solve_network(net, {}, guess);
  return {turns_per_phase_loop(spec) * sol.phi_sp, std::move(sol)};
}

double flux_linkage(const MotorSpec& spec, double theta, double current, Phase phase, Mode mode) {
  return flux_linkage_detail(spec, theta, current, phase, mode).lambda;
}

// ---------------------------------------------------------------------------
// Debug dump

std::string network_to_json(const MecNetwork& net, const FluxSolution* sol) {
  using nlohmann::json;
  json j;
  j["nodes"] = net.node_count;
  j["mode"] = to_string(net.mode);
  j["form"] = net.form == NetworkForm::Full ? "full" : "simplified";
  j["operating_point"] = {{"theta_mech_deg", net.op.theta}, {"current_A", net.op.current},
                          {"phase", to_string(net.op.phase)}};
  json branches = json::array();
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& b = net.branches[k];
    json segs = json::array();
    for (const auto& s : b.segments) {
      if (const auto* l = std::get_if<LinearReluctance>(&s)) {
        segs.push_back({{"type", "linear"}, {"reluctance", l->reluctance}});
      } else {
        const auto& r = std::get<SaturableReluctance>(s);
        segs.push_back({{"type", "saturable"}, {"path_length_m", r.path_length}, {"area_m2", r.area}});
      }
    }
    json jb = {{"label", b.label}, {"from", b.from}, {"to", b.to}, {"mmf", b.mmf}, {"segments", segs}};
    if (sol) {
      jb["flux"] = sol->branch_flux[k];
      jb["reluctance"] = sol->branch_reluctance[k];
    }
    branches.push_back(jb);
  }
  j["branches"] = branches;
  json sources = json::array();
  for (const auto& s : net.flux_sources)
    sources.push_back({{"label", s.label}, {"from", s.from}, {"to", s.to}, {"flux", s.flux}});
  j["flux_sources"] = sources;
  if (sol) {
    j["residual"] = sol->residual;
    j["iterations"] = sol->iterations;
    j["phi"] = {{"sy", sol->phi_sy}, {"sp", sol->phi_sp}, {"ry", sol->phi_ry},
                {"g", sol->phi_g},   {"pm1", sol->phi_pm1}, {"pm2", sol->phi_pm2}};
    j["R_star"] = sol->r_star;
  }
  return j.dump(2);
}

}  // namespace srm
