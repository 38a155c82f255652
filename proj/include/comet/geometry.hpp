#pragma once

#include "comet/dispersion.hpp"

namespace comet {

/// Detector raster. Pixel (col, row) has its centre at
/// (origin_x_um + col·pitch, origin_y_um + row·pitch) on the detection plane.
struct DetectorGeometry {
  int width = 1024;
  int height = 1024;
  double pixel_pitch_um = 13.0;
  double origin_x_um = -0.5 * (1024 - 1) * 13.0;
  double origin_y_um = -0.5 * (1024 - 1) * 13.0;

  /// Geometry with the plane origin at the raster centre.
  static DetectorGeometry centered(int width, int height, double pitch_um);
};

/// Fixed optical constants of the grating + 4-f imaging setup and the
/// two-beam interferometer in front of it.
struct OpticalConfig {
  double focal_length_um = 2.0e5;
  double grating_period_um = 1.0e3 / 1200.0;
  double incidence_rad = 0.6981317007977318;  // 40°
  double signal_um = 0.795;
  double optical_path_difference_um = 0.0;
  double visibility = 0.0;
  double phase_offset_rad = 0.0;
  /// Pin the fringe phase so the centre wavelength sits on a bright fringe.
  bool bright_center = true;
  DetectorGeometry detector;

  /// Throws InvalidArgumentError when any invariant fails, including the
  /// existence of a real centre reflection angle.
  void validate() const;

  /// θ_r0 solving d_g(sin θ_in0 + sin θ_r0) = λ_s0.
  double reflection_angle0() const;
};

/// Point on the detection plane (µm). `primed` marks pre-grating coordinates.
struct PlaneCoord {
  double x_um = 0.0;
  double y_um = 0.0;
  bool primed = true;
};

enum class Branch { plus, minus };

/// Largest |x′/f| for which the linearized map is accepted.
inline constexpr double kSmallAngleCap = 0.1;

/// θ_r = arcsin(λ/d_g − sin θ_in). Throws EvanescentOrderError when the
/// argument leaves (−1, 1).
double reflect_angle(const OpticalConfig& cfg, double lambda_um, double incidence_rad);

// Detector-plane convention for the two maps below: both x′ and x run
// opposite to the angular offsets, x′ = −f(θ_in − θ_in0) and
// x = −f(θ_r − θ_r0). Under this convention the comet tail opens toward
// +x and the ridge vertex sits at negative x.

/// Exact grating remap of a pre-grating point.
PlaneCoord translate_exact(const OpticalConfig& cfg, double lambda_um, PlaneCoord source);

/// First-order remap
///   x = [f(λ_s0 − λ)/d_g − cos θ_in0·x′] / cos θ_r0,   y = y′.
/// Throws InvalidArgumentError when |x′/f| exceeds kSmallAngleCap.
PlaneCoord translate_linearized(const OpticalConfig& cfg, double lambda_um, PlaneCoord source);

/// Pre-grating abscissa of the emission ring for λ at height y:
/// x′ = ±√(f²·b₂(λ_s0 − λ) − y²). Throws OffRingError when |y| exceeds
/// the ring radius.
double ring_abscissa(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um, double y_um,
                     Branch branch);

/// Ring radius f·θ_out(λ) on the pre-grating plane.
double ring_radius(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um);

}  // namespace comet
