#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "srm/drive_control.hpp"
#include "srm/error.hpp"

using namespace srm;

namespace {

DriveConfig drive_with(double alpha, double beta, double unaligned = 8.4) {
  DriveConfig d;
  d.commutation = commutation_from_alpha_beta(alpha, beta, 20.0);
  d.commutation.unaligned_angle = unaligned;
  d.commutation.aligned_angle = unaligned + 10.0 + alpha;
  d.commutation.nominal_aligned = 0.0;
  return d;
}

// Measure of the set where `pred` holds over one pitch, on a fine grid.
template <typename Pred>
double measure(Pred pred) {
  const int n = 200000;
  const double h = 20.0 / n;
  int count = 0;
  for (int k = 0; k < n; ++k)
    if (pred((k + 0.5) * h)) ++count;
  return count * h;
}

}  // namespace

TEST_SUITE("drive_control") {

TEST_CASE("gate truth table is AND") {
  for (bool s : {false, true})
    for (bool c : {false, true}) CHECK(gate(s, c) == (s && c));
}

TEST_CASE("hysteresis switches only at band crossings") {
  DriveConfig d;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> level(4.5, 7.5);
  std::normal_distribution<double> walk(0.0, 0.15);
  const double lo = d.i_ref - d.delta, hi = d.i_ref + d.delta;
  long transitions = 0;
  bool ok = true;
  for (int seq = 0; seq < 100000; ++seq) {
    bool s = seq % 2 == 0;
    double i = level(rng);
    for (int k = 0; k < 20; ++k) {
      i += walk(rng);
      const bool next = hysteresis_step(i, d, s);
      if (next != s) {
        ++transitions;
        if (next && !(i < lo)) ok = false;
        if (!next && !(i > hi)) ok = false;
      } else if (s && i > hi) {
        ok = false;  // must turn off above the band
      } else if (!s && i < lo) {
        ok = false;  // must turn on below the band
      }
      s = next;
    }
  }
  CHECK(ok);
  CHECK(transitions > 10000);
}

TEST_CASE("conduction window measure and overlap") {
  const DriveConfig d = drive_with(1.025, 0.326);
  const double on = d.commutation.theta_on;
  CHECK(measure([&](double th) { return commutation_signals(th, d).first; }) == doctest::Approx(on).epsilon(1e-4));
  CHECK(measure([&](double th) { return commutation_signals(th, d).second; }) == doctest::Approx(on).epsilon(1e-4));
  const double overlap = measure([&](double th) {
    const auto [a, b] = commutation_signals(th, d);
    return a && b;
  });
  // Two hand-overs per pitch, each overlapping by alpha - beta.
  CHECK(overlap == doctest::Approx(2.0 * (1.025 - 0.326)).epsilon(1e-3));
  // 10.699 mech deg on an 18-tooth rotor spans 192.6 elec deg.
  CHECK(on * 18.0 == doctest::Approx(192.582));
}

TEST_CASE("alpha = beta windows abut") {
  const DriveConfig d = drive_with(0.0, 0.0);
  const double both = measure([&](double th) {
    const auto [a, b] = commutation_signals(th, d);
    return a && b;
  });
  const double either = measure([&](double th) {
    const auto [a, b] = commutation_signals(th, d);
    return a || b;
  });
  CHECK(both == 0.0);
  CHECK(either == doctest::Approx(20.0));
}

TEST_CASE("window starts at the unaligned angle and phase B trails by half a pitch") {
  const DriveConfig d = drive_with(1.4, 0.2, 8.4);
  CHECK_FALSE(commutation_signals(8.39, d).first);
  CHECK(commutation_signals(8.41, d).first);
  CHECK(commutation_signals(18.41, d).second);
  CHECK(commutation_signals(28.41, d).first);  // periodic
  const auto table = commutation_table(d);
  REQUIRE(table.size() == 2);
  CHECK(table[0].on_angle == doctest::Approx(8.4));
  CHECK(table[1].on_angle == doctest::Approx(18.4));
  CHECK(table[0].off_angle == doctest::Approx(std::fmod(8.4 + 11.2, 20.0)));
  CHECK(nlohmann::json::parse(commutation_table_json(d)).size() == 2);
}

TEST_CASE("conventional window ends at the nominal aligned position") {
  DriveConfig d = drive_with(1.4, 0.2, 8.4);
  d.mode = CommutationMode::Conventional;
  const auto [start, width] = conduction_window(d);
  CHECK(start == doctest::Approx(10.0));
  CHECK(width == doctest::Approx(10.0));
}

TEST_CASE("encoder quantization delays the edges") {
  DriveConfig d = drive_with(1.4, 0.2, 8.4);
  d.encoder_step = 0.5;
  CHECK_FALSE(commutation_signals(8.45, d).first);
  CHECK(commutation_signals(8.5, d).first);
}

TEST_CASE("inverter voltages") {
  DriveConfig d;
  CHECK(inverter_voltage(true, 3.0, d) == 150.0);
  CHECK(inverter_voltage(false, 3.0, d) == -150.0);
  CHECK(inverter_voltage(false, 0.0, d) == 0.0);
  d.chopping = Chopping::Soft;
  CHECK(inverter_voltage(false, true, 3.0, d) == 0.0);
  CHECK(inverter_voltage(false, false, 3.0, d) == -150.0);
  d.device_drop = 1.0;
  CHECK(inverter_voltage(true, 3.0, d) == 149.0);
}

TEST_CASE("controller applies the gate invariant each step") {
  Controller c(drive_with(1.4, 0.2));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> th(0.0, 40.0), cur(5.0, 7.0);
  for (int k = 0; k < 10000; ++k) {
    const auto& g = c.step(th(rng), cur(rng), cur(rng));
    CHECK(g.g_a == (g.s_a && g.c_a));
    CHECK(g.g_b == (g.s_b && g.c_b));
  }
}

TEST_CASE("drive validation") {
  DriveConfig d = drive_with(1.4, 0.2);
  d.v_dc = 0.0;
  CHECK_NOTHROW(validate(d));
  d.delta = 0.0;
  CHECK_THROWS_AS(validate(d), ConfigError);
  d = drive_with(1.4, 0.2);
  d.v_dc = -1.0;
  CHECK_THROWS_AS(validate(d), ConfigError);
  d = drive_with(12.0, 0.0);
  CHECK_THROWS_AS(validate(d), ConfigError);
}

}  // TEST_SUITE
