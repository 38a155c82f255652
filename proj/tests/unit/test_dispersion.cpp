#include <doctest.h>

#include <cmath>

#include "comet/constants.hpp"
#include "comet/dispersion.hpp"
#include "comet/error.hpp"
#include "oracle.hpp"

using namespace comet;

namespace {

DispersionModel default_model() { return {ktp_z_fradkin_1999(), 0.525, 0.795}; }

// Dispersionless medium: n = 1.8 everywhere.
SellmeierSet flat_set() {
  SellmeierSet s;
  s.label = "flat";
  s.constant = 1.8 * 1.8;
  s.lambda_min_um = 0.3;
  s.lambda_max_um = 3.0;
  return s;
}

}  // namespace

TEST_CASE("idler from exact energy conservation") {
  const auto m = default_model();
  CHECK(m.idler_um() == doctest::Approx(1.0 / (1.0 / 0.525 - 1.0 / 0.795)).epsilon(1e-15));
  CHECK(m.idler_um() == doctest::Approx(1.5458333).epsilon(1e-6));
}

TEST_CASE("default model predicts b2 near 0.094 per um") {
  const TuningCurve tc = compute_b2(default_model());
  CHECK(tc.b2_per_um == doctest::Approx(0.094).epsilon(0.10));
  CHECK(tc.b2_per_um > 0.0);
  CHECK(tc.b2_per_um == doctest::Approx(kTwoPi * kSpeedOfLight / (0.795 * 0.795) * tc.b1_s).epsilon(1e-14));
}

TEST_CASE("b1 agrees with small-angle phase matching") {
  const auto m = default_model();
  const long double ref = oracle::b1_phase_matching(m.sellmeier(), 0.525, 0.795);
  CHECK(compute_b1(m) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-6));
  const DispersionModel kato(ktp_z_kato_2002(), 0.525, 0.795);
  CHECK(compute_b1(kato) ==
        doctest::Approx(static_cast<double>(oracle::b1_phase_matching(kato.sellmeier(), 0.525, 0.795))).epsilon(1e-6));
}

TEST_CASE("Sellmeier derivatives match finite differences on a 100-point grid") {
  for (const auto& set : {ktp_z_fradkin_1999(), ktp_z_kato_2002()}) {
    CAPTURE(set.label);
    const double lo = set.lambda_min_um + 0.01, hi = set.lambda_max_um - 0.01;
    for (int k = 0; k < 100; ++k) {
      const double l = lo + (hi - lo) * k / 99.0;
      CAPTURE(l);
      CHECK(refractive_index(set, l) == doctest::Approx(static_cast<double>(oracle::index_ld(set, l))).epsilon(1e-14));
      CHECK(dn_dlambda(set, l) == doctest::Approx(static_cast<double>(oracle::dn_dlambda_fd(set, l))).epsilon(1e-6));
      CHECK(dn_domega(set, l) == doctest::Approx(static_cast<double>(oracle::dn_domega_fd(set, l))).epsilon(1e-6));
    }
  }
}

TEST_CASE("beta is well defined where dn/dlambda crosses zero") {
  // n² = 2 + λ²/(λ² − 0.01) + 0.01·λ²
  SellmeierSet s;
  s.label = "turning";
  s.constant = 2.0;
  s.poles = {{1.0, 0.01}};
  s.ir_term_um2inv = -0.01;
  s.lambda_min_um = 0.3;
  s.lambda_max_um = 3.0;
  s.validate();
  // dn²/dλ = −2·0.01·λ/(λ² − 0.01)² + 0.02·λ = 0  →  (λ² − 0.01)² = 1.
  const double turn = std::sqrt(1.01);
  CHECK(std::abs(dn_dlambda(s, turn)) < 1e-12);
  CHECK(std::abs(dn_domega(s, turn)) < 1e-25);
  CHECK(std::isfinite(dn_domega(s, turn)));
}

TEST_CASE("dispersionless medium gives b1 = 0") {
  const DispersionModel m(flat_set(), 0.525, 0.795);
  CHECK(std::abs(compute_b1(m)) < 1e-30);
  CHECK(dn_domega(flat_set(), 0.8) == 0.0);
}

TEST_CASE("b2 round trips through tuning_curve_from_b2") {
  const TuningCurve tc = compute_b2(default_model());
  const TuningCurve back = tuning_curve_from_b2(0.795, tc.b2_per_um);
  CHECK(back.b1_s == doctest::Approx(tc.b1_s).epsilon(1e-14));
  CHECK(back.theta_squared(0.785) == doctest::Approx(tc.b2_per_um * 0.010).epsilon(1e-12));
  CHECK(back.theta_squared(0.795) == 0.0);
  CHECK_THROWS_AS(back.theta_squared(0.796), InvalidArgumentError);
}

TEST_CASE("tuning angle at 10 nm detuning") {
  const TuningCurve tc = tuning_curve_from_b2(0.795, 0.094);
  CHECK(std::sqrt(tc.theta_squared(0.785)) * 1e3 == doctest::Approx(30.66).epsilon(1e-3));
}

TEST_CASE("QPM mismatch is linear in the grating vector") {
  const auto m = default_model();
  const double bulk = qpm_mismatch(m, INFINITY);
  CHECK(bulk > 0.0);
  for (double period : {5.0, 9.34, 20.0}) {
    CHECK(qpm_mismatch(m, period) == doctest::Approx(bulk - kTwoPi / period).epsilon(1e-12));
  }
  CHECK(std::abs(qpm_mismatch(m, matched_poling_period(m))) < 1e-12);
  CHECK(matched_poling_period(m) == doctest::Approx(9.34).epsilon(0.01));
}

TEST_CASE("evaluation outside the validity range is rejected") {
  const auto s = ktp_z_fradkin_1999();
  CHECK_THROWS_AS(refractive_index(s, 0.2), OutOfRangeError);
  CHECK_THROWS_AS(dn_domega(s, s.lambda_max_um), OutOfRangeError);
  CHECK_THROWS_AS(DispersionModel(s, 0.795, 0.525), InvalidArgumentError);
  CHECK_THROWS_AS(builtin_sellmeier("nope"), ConfigError);
  for (const auto& label : builtin_sellmeier_labels()) CHECK(builtin_sellmeier(label).label == label);
}
