#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "comet/dispersion.hpp"
#include "comet/geometry.hpp"
#include "comet/image.hpp"

namespace comet {

/// Post-grating abscissa of the λ ring at height y (linearized map):
///
///   x = [f(λ_s0 − λ)/d_g ∓ cos θ_in0·√(b₂(λ_s0 − λ)f² − y²)] / cos θ_r0
///
/// Branch::plus takes the upper sign and carries the bright ridge. Throws
/// OffRingError when the radicand is negative.
double analytic_x(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um, double y_um, Branch branch);

/// Wavelength where ∂x/∂λ = 0 on the ridge branch:
///   λ_s0 − λ* = [y² + (d_g·b₂·f·cos θ_in0 / 2)²] / (b₂·f²)
double stationary_wavelength(const OpticalConfig& cfg, const TuningCurve& tc, double y_um);

/// Largest |y| whose stationary wavelength is still ≥ min_lambda_um; 0 when
/// even the vertex falls outside.
double ridge_y_limit(const OpticalConfig& cfg, const TuningCurve& tc, double min_lambda_um);

/// Ridge x = a·y² − c. `c` is stored as the positive vertex depth; the
/// vertex is at x = −c.
struct RidgeParabola {
  double a_per_um = 0.0;
  double c_um = 0.0;

  double x_at(double y_um) const { return a_per_um * y_um * y_um - c_um; }
};

/// a = 1/(d_g·b₂·f·cos θ_r0), c = d_g·b₂·f·cos²θ_in0 / (4·cos θ_r0).
RidgeParabola ridge_parabola(const OpticalConfig& cfg, const TuningCurve& tc);

struct RidgePoint {
  double y_um = 0.0;
  double x_um = 0.0;
  double weight = 0.0;
  bool subpixel = false;
};

struct RidgeWindow {
  /// Rows with |y| above this are ignored. Infinity keeps every row.
  double y_max_um = std::numeric_limits<double>::infinity();
  /// Rows whose maximum is below this fraction of the window maximum are
  /// dropped.
  double floor_fraction = 0.05;
  static constexpr int kMinPoints = 5;
};

/// Per-row argmax with 3-point parabolic subpixel refinement. Throws
/// TooFewPointsError when fewer than five rows qualify.
std::vector<RidgePoint> extract_ridge(const ImageGrid& image, const RidgeWindow& window = {});

struct RidgeFit {
  double a_per_um = 0.0;
  double c_um = 0.0;
  double sigma_a = 0.0;
  double sigma_c = 0.0;
  double residual_rms_um = 0.0;
  int points = 0;

  RidgeParabola parabola() const { return {a_per_um, c_um}; }
};

/// Weighted linear least squares of x against {y², 1}; weights are the
/// point weights. Standard errors come from the weighted residual variance
/// times the normal-equation covariance. Throws TooFewPointsError (< 5) or
/// DegenerateFitError (no spread in y²).
RidgeFit fit_parabola(std::span<const RidgePoint> points);

enum class B2Source { from_a, from_c, predictive };
std::string to_string(B2Source source);

struct B2Estimate {
  double value = 0.0;
  /// Propagated from the fit standard error alone.
  double fit_sigma = 0.0;
  /// Fit error combined in quadrature with the incidence-angle error.
  double sigma = 0.0;
  B2Source source = B2Source::predictive;
};

/// b₂ = 1/(d_g·a·f·cos θ_r0).
B2Estimate b2_from_a(const OpticalConfig& cfg, double a_per_um, double sigma_a = 0.0,
                     double sigma_incidence_rad = 0.0);

/// b₂ = 4c·cos θ_r0/(d_g·f·cos²θ_in0).
B2Estimate b2_from_c(const OpticalConfig& cfg, double c_um, double sigma_c = 0.0, double sigma_incidence_rad = 0.0);

struct TuningSample {
  double lambda_um = 0.0;
  double theta_out_rad = 0.0;
};

struct TuningCurveSamples {
  std::vector<TuningSample> samples;
  /// Inputs above λ_s0, skipped.
  std::vector<double> rejected_um;
};

/// θ_out = √(b₂(λ_s0 − λ)) for each λ ≤ λ_s0.
TuningCurveSamples tuning_curve_samples(const TuningCurve& tc, std::span<const double> lambdas_um);

}  // namespace comet
