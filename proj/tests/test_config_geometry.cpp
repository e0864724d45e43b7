#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "srm/config_geometry.hpp"
#include "srm/error.hpp"

using namespace srm;

namespace {

// Brute-force overlap: walk the tooth span in tiny cells and count the cells
// covered by any rotor pole on a wide ring of poles.
double grid_overlap(double displacement, double tooth_arc, const MotorSpec& s) {
  const double h = 1e-4;
  const double pitch = s.rotor_pitch();
  double covered = 0.0;
  for (double x = -0.5 * tooth_arc + 0.5 * h; x < 0.5 * tooth_arc; x += h) {
    for (int k = -4; k <= 4; ++k) {
      const double centre = -displacement + k * pitch;
      if (std::abs(x - centre) <= 0.5 * s.rotor_pole_arc) {
        covered += h;
        break;
      }
    }
  }
  return covered;
}

}  // namespace

TEST_SUITE("config_geometry") {

TEST_CASE("Table I preset geometry") {
  const MotorSpec s = preset("table1-motor1");
  CHECK(bore_diameter(s) == doctest::Approx(51.2).epsilon(1e-12));
  CHECK(s.rotor_pitch() == doctest::Approx(20.0));
  CHECK(s.tooth_arc + s.tooth_extension == doctest::Approx(s.wide_tooth_arc));
  CHECK_FALSE(s.has_pm1());
  CHECK_FALSE(s.has_pm2());
  CHECK(preset("table1-motor2").has_pm1());
  CHECK(preset("table1-motor3").has_pm2());
  CHECK(preset("table1-motor4").has_pm1());
  CHECK(preset("table1-motor4").has_pm2());
  CHECK(preset_names().size() == 4);
}

TEST_CASE("air-gap reluctance at full narrow-tooth overlap") {
  const MotorSpec s = preset("table1-motor1");
  // 0.3e-3 / (4*pi*1e-7 * 0.0256 * rad(8.4) * 0.020), evaluated by hand.
  CHECK(airgap_reluctance(8.4, s, 8.4) == doctest::Approx(3180422.1986).epsilon(1e-9));
  // Zero overlap falls back to the fringing floor, which is finite.
  CHECK(airgap_reluctance(0.0, s, 8.4) == doctest::Approx(fringing_floor_reluctance(s, 8.4)));
  CHECK(std::isfinite(airgap_reluctance(0.0, s, 8.4)));
}

TEST_CASE("overlap agrees with grid intersection") {
  const MotorSpec s = preset("table1-motor1");
  for (double arc : {s.tooth_arc, s.wide_tooth_arc}) {
    for (double d = -25.0; d <= 25.0; d += 0.37) {
      CHECK(std::abs(overlap_arc(d, arc, s) - grid_overlap(d, arc, s)) <= 3e-4);
    }
  }
}

TEST_CASE("overlap is even, periodic and bounded") {
  const MotorSpec s = preset("table1-motor1");
  for (double d = 0.0; d < 20.0; d += 0.13) {
    const double o = overlap_arc(d, s.wide_tooth_arc, s);
    CHECK(o == overlap_arc(-d, s.wide_tooth_arc, s));
    CHECK(o == doctest::Approx(overlap_arc(d + 20.0, s.wide_tooth_arc, s)).epsilon(1e-12));
    CHECK(o >= 0.0);
    CHECK(o <= s.wide_tooth_arc + 1e-12);
  }
  CHECK(overlap_arc(0.0, s.tooth_arc, s) == doctest::Approx(s.tooth_arc));
  CHECK(overlap_arc(10.0, s.tooth_arc, s) == doctest::Approx(0.0));
}

TEST_CASE("spec JSON round trip preserves the hash") {
  for (const auto& name : preset_names()) {
    const MotorSpec s = preset(name);
    const MotorSpec back = load_motor_spec(to_json(s));
    CHECK(back == s);
    CHECK(spec_hash(back) == spec_hash(s));
  }
  CHECK(spec_hash(preset("table1-motor1")) != spec_hash(preset("table1-motor4")));
}

TEST_CASE("preset key in a spec file") {
  const MotorSpec s = load_motor_spec(R"({"preset": "table1-motor3", "N_pole": 80})");
  CHECK(s.topology == Topology::Motor3);
  CHECK(s.turns_per_pole == 80);
}

TEST_CASE("invalid specs are rejected with field context") {
  auto j = nlohmann::json::parse(to_json(preset("table1-motor1")));
  j["l_g"] = 0.0;
  try {
    load_motor_spec(j.dump());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("air-gap length must be positive") != std::string::npos);
  }

  auto k = nlohmann::json::parse(to_json(preset("table1-motor1")));
  k["not_a_field"] = 1;
  CHECK_THROWS_AS(load_motor_spec(k.dump()), ConfigError);

  auto m = nlohmann::json::parse(to_json(preset("table1-motor1")));
  m.erase("N_pole");
  CHECK_THROWS_AS(load_motor_spec(m.dump()), ConfigError);

  MotorSpec bad = preset("table1-motor1");
  bad.outer_diameter = 40.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK_THROWS_AS(preset("table1-motor9"), ConfigError);
}

TEST_CASE("symmetric variant narrows the wide tooth only") {
  const MotorSpec s = preset("table1-motor4");
  const MotorSpec v = symmetric_variant(s);
  CHECK(v.wide_tooth_arc == s.tooth_arc);
  CHECK(v.topology == s.topology);
  CHECK(v.pm1_length == s.pm1_length);
}

TEST_CASE("B-H curve inversion and limits") {
  const BHCurve c = BHCurve::m19_24g();
  for (double b = -2.2; b <= 2.2; b += 0.01) {
    const double h = c.field(b);
    CHECK(c.flux_density(h) == doctest::Approx(b).epsilon(1e-10));
    CHECK(c.field_slope(b) > 0.0);
  }
  CHECK(c.field(0.0) == 0.0);
  CHECK(c.field(-1.2) == -c.field(1.2));
  // Beyond the last point the slope is that of free space.
  CHECK(c.field_slope(2.3) == doctest::Approx(1.0 / kMu0));
  CHECK(c.initial_permeability() == doctest::Approx(0.36 / 47.74));
}

TEST_CASE("magnet Thevenin source") {
  const MotorSpec s = preset("table1-motor2");
  const MagnetSource m = magnet_source(s, 5.0);
  CHECK(m.mmf == doctest::Approx(900e3 * 5e-3));
  CHECK(m.reluctance == doctest::Approx(5e-3 / (kMu0 * 1.05 * 5e-3 * 20e-3)));
}

}  // TEST_SUITE
