#include "comet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "comet/error.hpp"

namespace comet {

double analytic_x(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um, double y_um, Branch branch) {
  const double f = cfg.focal_length_um;
  const double detuning = tc.signal_um - lambda_um;
  const double radicand = tc.b2_per_um * detuning * f * f - y_um * y_um;
  if (radicand < 0.0 || detuning < 0.0) {
    std::ostringstream os;
    os << "no ring point at y = " << y_um << " um for lambda = " << lambda_um << " um";
    throw OffRingError(os.str());
  }
  const double ring = std::cos(cfg.incidence_rad) * std::sqrt(radicand);
  const double shift = f * detuning / cfg.grating_period_um;
  return (branch == Branch::plus ? shift - ring : shift + ring) / std::cos(cfg.reflection_angle0());
}

double stationary_wavelength(const OpticalConfig& cfg, const TuningCurve& tc, double y_um) {
  const double f = cfg.focal_length_um;
  const double half_chord = 0.5 * cfg.grating_period_um * tc.b2_per_um * f * std::cos(cfg.incidence_rad);
  return tc.signal_um - (y_um * y_um + half_chord * half_chord) / (tc.b2_per_um * f * f);
}

double ridge_y_limit(const OpticalConfig& cfg, const TuningCurve& tc, double min_lambda_um) {
  const double f = cfg.focal_length_um;
  const double half_chord = 0.5 * cfg.grating_period_um * tc.b2_per_um * f * std::cos(cfg.incidence_rad);
  const double y2 = tc.b2_per_um * f * f * (tc.signal_um - min_lambda_um) - half_chord * half_chord;
  return y2 > 0.0 ? std::sqrt(y2) : 0.0;
}

RidgeParabola ridge_parabola(const OpticalConfig& cfg, const TuningCurve& tc) {
  const double f = cfg.focal_length_um;
  const double dg = cfg.grating_period_um;
  const double cos_r0 = std::cos(cfg.reflection_angle0());
  const double cos_in = std::cos(cfg.incidence_rad);
  return {1.0 / (dg * tc.b2_per_um * f * cos_r0), dg * tc.b2_per_um * f * cos_in * cos_in / (4.0 * cos_r0)};
}

std::vector<RidgePoint> extract_ridge(const ImageGrid& image, const RidgeWindow& window) {
  struct RowPeak {
    int row;
    int col;
    double value;
  };
  std::vector<RowPeak> peaks;
  double window_max = 0.0;
  for (int r = 0; r < image.height(); ++r) {
    if (std::abs(image.y_at(r)) > window.y_max_um) continue;
    const auto row = image.row(r);
    const auto it = std::max_element(row.begin(), row.end());
    const int col = static_cast<int>(it - row.begin());
    peaks.push_back({r, col, *it});
    window_max = std::max(window_max, *it);
  }

  std::vector<RidgePoint> points;
  if (window_max > 0.0) {
    const double floor = window.floor_fraction * window_max;
    for (const auto& p : peaks) {
      if (!(p.value > floor) || !(p.value > 0.0)) continue;
      const auto row = image.row(p.row);
      double offset = 0.0;
      bool refined = false;
      if (p.col > 0 && p.col + 1 < image.width()) {
        const double l = row[static_cast<std::size_t>(p.col - 1)];
        const double r = row[static_cast<std::size_t>(p.col + 1)];
        const double curvature = l - 2.0 * p.value + r;
        if (curvature < 0.0) {
          offset = std::clamp(0.5 * (l - r) / curvature, -0.5, 0.5);
          refined = true;
        }
      }
      points.push_back({image.y_at(p.row), image.x_at(p.col) + offset * image.spec().pixel_pitch_um, p.value, refined});
    }
  }
  if (static_cast<int>(points.size()) < RidgeWindow::kMinPoints) {
    std::ostringstream os;
    os << "ridge extraction found " << points.size() << " rows above the noise floor; need at least "
       << RidgeWindow::kMinPoints;
    throw TooFewPointsError(os.str());
  }
  return points;
}

RidgeFit fit_parabola(std::span<const RidgePoint> points) {
  const int n = static_cast<int>(points.size());
  if (n < RidgeWindow::kMinPoints) throw TooFewPointsError("parabola fit needs at least 5 points");

  // Centre the regressor u = y² before forming the normal equations.
  double sw = 0.0, su = 0.0, sx = 0.0;
  for (const auto& p : points) {
    if (!(p.weight > 0.0)) throw InvalidArgumentError("ridge point weights must be > 0");
    const double u = p.y_um * p.y_um;
    sw += p.weight;
    su += p.weight * u;
    sx += p.weight * p.x_um;
  }
  const double u_mean = su / sw;
  const double x_mean = sx / sw;
  double suu = 0.0, sux = 0.0, u_scale = 0.0;
  for (const auto& p : points) {
    const double du = p.y_um * p.y_um - u_mean;
    suu += p.weight * du * du;
    sux += p.weight * du * (p.x_um - x_mean);
    u_scale = std::max(u_scale, std::abs(p.y_um * p.y_um));
  }
  if (!(suu > 1e-24 * sw * u_scale * u_scale) || u_scale == 0.0) {
    throw DegenerateFitError("parabola fit is degenerate: all points share the same y^2");
  }

  RidgeFit fit;
  fit.points = n;
  fit.a_per_um = sux / suu;
  const double intercept = x_mean - fit.a_per_um * u_mean;
  fit.c_um = -intercept;

  double chi2 = 0.0, ss = 0.0;
  for (const auto& p : points) {
    const double r = p.x_um - (fit.a_per_um * p.y_um * p.y_um + intercept);
    chi2 += p.weight * r * r;
    ss += r * r;
  }
  const double s2 = chi2 / (n - 2);
  fit.sigma_a = std::sqrt(s2 / suu);
  fit.sigma_c = std::sqrt(s2 * (1.0 / sw + u_mean * u_mean / suu));
  fit.residual_rms_um = std::sqrt(ss / n);
  return fit;
}

std::string to_string(B2Source source) {
  switch (source) {
    case B2Source::from_a:
      return "from-a";
    case B2Source::from_c:
      return "from-c";
    case B2Source::predictive:
      return "predictive";
  }
  return "unknown";
}

B2Estimate b2_from_a(const OpticalConfig& cfg, double a_per_um, double sigma_a, double sigma_incidence_rad) {
  if (!(a_per_um > 0.0)) throw InvalidArgumentError("b2 from a needs a > 0");
  const double theta_r0 = cfg.reflection_angle0();
  const double cos_r0 = std::cos(theta_r0);
  B2Estimate est;
  est.source = B2Source::from_a;
  est.value = 1.0 / (cfg.grating_period_um * a_per_um * cfg.focal_length_um * cos_r0);
  est.fit_sigma = est.value * std::abs(sigma_a) / a_per_um;
  // dθ_r0/dθ_in0 = −cos θ_in0 / cos θ_r0
  const double dlog_dtheta = -std::tan(theta_r0) * std::cos(cfg.incidence_rad) / cos_r0;
  est.sigma = std::hypot(est.fit_sigma, est.value * dlog_dtheta * sigma_incidence_rad);
  return est;
}

B2Estimate b2_from_c(const OpticalConfig& cfg, double c_um, double sigma_c, double sigma_incidence_rad) {
  if (!(std::abs(c_um) > 0.0)) throw InvalidArgumentError("b2 from c needs |c| > 0");
  const double depth = std::abs(c_um);
  const double theta_r0 = cfg.reflection_angle0();
  const double cos_r0 = std::cos(theta_r0);
  const double cos_in = std::cos(cfg.incidence_rad);
  B2Estimate est;
  est.source = B2Source::from_c;
  est.value = 4.0 * depth * cos_r0 / (cfg.grating_period_um * cfg.focal_length_um * cos_in * cos_in);
  est.fit_sigma = est.value * std::abs(sigma_c) / depth;
  const double dlog_dtheta = std::tan(theta_r0) * cos_in / cos_r0 + 2.0 * std::tan(cfg.incidence_rad);
  est.sigma = std::hypot(est.fit_sigma, est.value * dlog_dtheta * sigma_incidence_rad);
  return est;
}

TuningCurveSamples tuning_curve_samples(const TuningCurve& tc, std::span<const double> lambdas_um) {
  TuningCurveSamples out;
  out.samples.reserve(lambdas_um.size());
  for (double l : lambdas_um) {
    if (l > tc.signal_um) {
      out.rejected_um.push_back(l);
      continue;
    }
    out.samples.push_back({l, std::sqrt(tc.theta_squared(l))});
  }
  return out;
}

}  // namespace comet
