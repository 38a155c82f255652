#include <doctest.h>

#include <cmath>
#include <vector>

#include "comet/analysis.hpp"
#include "comet/constants.hpp"
#include "comet/error.hpp"
#include "oracle.hpp"

using namespace comet;

namespace {

const OpticalConfig kCfg{};
const TuningCurve kTc = tuning_curve_from_b2(0.795, 0.094);

ImageGrid painted_parabola(double a, double c, double sigma_px) {
  ImageGrid img(DetectorGeometry{});
  const double pitch = img.spec().pixel_pitch_um;
  for (int r = 0; r < img.height(); ++r) {
    const double x0 = a * img.y_at(r) * img.y_at(r) - c;
    for (int col = 0; col < img.width(); ++col) {
      const double u = (img.x_at(col) - x0) / (sigma_px * pitch);
      img.at(col, r) = std::exp(-0.5 * u * u);
    }
  }
  return img;
}

std::vector<double> y_grid(int n, double half) {
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (n - 1);
  return y;
}

}  // namespace

TEST_CASE("stationary wavelength") {
  CHECK(kTc.signal_um - stationary_wavelength(kCfg, kTc, 0.0) == doctest::Approx(9.6e-3).epsilon(0.01));
  for (double y : {0.0, 1000.0, 3000.0, -4500.0}) {
    CAPTURE(y);
    CHECK(stationary_wavelength(kCfg, kTc, y) ==
          doctest::Approx(oracle::golden_stationary_wavelength(kCfg, kTc, y)).epsilon(1e-10));
  }
}

TEST_CASE("ridge coefficients") {
  const RidgeParabola p = ridge_parabola(kCfg, kTc);
  CHECK(p.a_per_um == doctest::Approx(6.72e-5).epsilon(2e-3));
  CHECK(p.c_um == doctest::Approx(2.42e3).epsilon(2e-3));
  SUBCASE("ridge is the x-minimum of the linearized map") {
    for (double y : {0.0, 2000.0, -3500.0}) {
      const double l = stationary_wavelength(kCfg, kTc, y);
      CHECK(analytic_x(kCfg, kTc, l, y, Branch::plus) == doctest::Approx(p.x_at(y)).epsilon(1e-10));
      CHECK(analytic_x(kCfg, kTc, l - 1e-4, y, Branch::plus) > p.x_at(y));
      CHECK(analytic_x(kCfg, kTc, l + 1e-4, y, Branch::plus) > p.x_at(y));
    }
  }
  SUBCASE("b2 inverts from either coefficient") {
    CHECK(b2_from_a(kCfg, p.a_per_um).value == doctest::Approx(0.094).epsilon(1e-12));
    CHECK(b2_from_c(kCfg, p.c_um).value == doctest::Approx(0.094).epsilon(1e-12));
  }
  CHECK_THROWS_AS(analytic_x(kCfg, kTc, 0.7949, 5000.0, Branch::plus), OffRingError);
}

TEST_CASE("ridge extraction") {
  const double a = 6.7e-5, c = 2420.0;
  const ImageGrid img = painted_parabola(a, c, 1.5);
  const auto pts = extract_ridge(img);
  CHECK(pts.size() == static_cast<std::size_t>(img.height()));
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, std::abs(p.x_um - (a * p.y_um * p.y_um - c)));
  CHECK(worst <= 0.5 * img.spec().pixel_pitch_um);
  SUBCASE("scale invariant") {
    ImageGrid bright = img;
    for (double& v : bright.values()) v *= 1234.5;
    const auto pts2 = extract_ridge(bright);
    REQUIRE(pts2.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(pts2[i].x_um - pts[i].x_um) < 1e-9);
  }
  SUBCASE("fit recovers the painted coefficients") {
    const RidgeFit fit = fit_parabola(pts);
    CHECK(fit.a_per_um == doctest::Approx(a).epsilon(1e-3));
    CHECK(fit.c_um == doctest::Approx(c).epsilon(1e-3));
  }
  SUBCASE("black image has no ridge") {
    CHECK_THROWS_AS(extract_ridge(ImageGrid(DetectorGeometry{})), TooFewPointsError);
  }
}

TEST_CASE("parabola fit") {
  const double a = 6.7165e-5, c = 2418.5;
  const auto ys = y_grid(401, 6000.0);
  SUBCASE("zero noise is exact") {
    std::vector<RidgePoint> pts;
    for (double y : ys) pts.push_back({y, a * y * y - c, 1.0, true});
    const RidgeFit fit = fit_parabola(pts);
    CHECK(fit.a_per_um == doctest::Approx(a).epsilon(1e-12));
    CHECK(fit.c_um == doctest::Approx(c).epsilon(1e-12));
    CHECK(fit.residual_rms_um < 1e-9);
  }
  SUBCASE("reported sigma matches Monte Carlo scatter") {
    const auto cal = oracle::calibrate_fit(a, c, ys, 2.0, 1000, 99);
    CHECK(cal.mean_reported_sigma_a == doctest::Approx(cal.empirical_sigma_a).epsilon(0.1));
    CHECK(cal.mean_reported_sigma_c == doctest::Approx(cal.empirical_sigma_c).epsilon(0.1));
    CHECK(cal.mean_a == doctest::Approx(a).epsilon(1e-3));
    const auto cal10 = oracle::calibrate_fit(a, c, ys, 20.0, 1000, 99);
    CHECK(cal10.mean_reported_sigma_a / cal.mean_reported_sigma_a == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(cal10.mean_reported_sigma_c / cal.mean_reported_sigma_c == doctest::Approx(10.0).epsilon(1e-6));
  }
  SUBCASE("errors") {
    std::vector<RidgePoint> four(4, {1.0, 1.0, 1.0, true});
    CHECK_THROWS_AS(fit_parabola(four), TooFewPointsError);
    std::vector<RidgePoint> flat;
    for (int i = 0; i < 10; ++i) flat.push_back({i % 2 ? 5.0 : -5.0, 1.0 + i, 1.0, true});
    CHECK_THROWS_AS(fit_parabola(flat), DegenerateFitError);
  }
}

TEST_CASE("b2 uncertainty") {
  const RidgeParabola p = ridge_parabola(kCfg, kTc);
  const double dtheta = deg_to_rad(1.0);
  const B2Estimate ea = b2_from_a(kCfg, p.a_per_um, 0.0, dtheta);
  const B2Estimate ec = b2_from_c(kCfg, p.c_um, 0.0, dtheta);
  CHECK(ea.source == B2Source::from_a);
  CHECK(to_string(ec.source) == "from-c");
  CHECK(ec.sigma > ea.sigma);
  // Log-derivative check against a finite difference in the incidence angle.
  OpticalConfig tilted = kCfg;
  tilted.incidence_rad += 1e-6;
  const double da = (b2_from_a(tilted, p.a_per_um).value - ea.value) / 1e-6;
  const double dc = (b2_from_c(tilted, p.c_um).value - ec.value) / 1e-6;
  CHECK(ea.sigma == doctest::Approx(std::abs(da) * dtheta).epsilon(1e-4));
  CHECK(ec.sigma == doctest::Approx(std::abs(dc) * dtheta).epsilon(1e-4));
  const B2Estimate fit_only = b2_from_a(kCfg, p.a_per_um, 1e-8, 0.0);
  CHECK(fit_only.fit_sigma == doctest::Approx(fit_only.value * 1e-8 / p.a_per_um).epsilon(1e-12));
}

TEST_CASE("tuning curve samples") {
  const std::vector<double> ls{0.785, 0.795, 0.80};
  const auto out = tuning_curve_samples(kTc, ls);
  REQUIRE(out.samples.size() == 2);
  CHECK(out.samples[0].theta_out_rad * 1e3 == doctest::Approx(30.7).epsilon(2e-3));
  CHECK(out.samples[1].theta_out_rad == 0.0);
  CHECK(out.rejected_um == std::vector<double>{0.80});
}
