#include "comet/geometry.hpp"

#include <cmath>
#include <sstream>

#include "comet/constants.hpp"
#include "comet/error.hpp"

namespace comet {

DetectorGeometry DetectorGeometry::centered(int width, int height, double pitch_um) {
  DetectorGeometry d;
  d.width = width;
  d.height = height;
  d.pixel_pitch_um = pitch_um;
  d.origin_x_um = -0.5 * (width - 1) * pitch_um;
  d.origin_y_um = -0.5 * (height - 1) * pitch_um;
  return d;
}

void OpticalConfig::validate() const {
  auto fail = [](const char* what) { throw InvalidArgumentError(std::string("optical config: ") + what); };
  if (!(focal_length_um > 0.0) || !std::isfinite(focal_length_um)) fail("focal length must be > 0");
  if (!(grating_period_um > 0.0) || !std::isfinite(grating_period_um)) fail("grating constant must be > 0");
  if (!(incidence_rad > 0.0 && incidence_rad < kPi / 2)) fail("incidence angle must lie in (0, pi/2)");
  if (!(signal_um > 0.0)) fail("centre signal wavelength must be > 0");
  if (!(visibility >= 0.0 && visibility <= 1.0)) fail("visibility must lie in [0, 1]");
  if (!std::isfinite(optical_path_difference_um)) fail("optical path difference must be finite");
  if (!std::isfinite(phase_offset_rad)) fail("phase offset must be finite");
  if (!(detector.pixel_pitch_um > 0.0)) fail("pixel pitch must be > 0");
  if (detector.width < 1 || detector.height < 1) fail("detector must have at least one pixel");
  const double s = signal_um / grating_period_um - std::sin(incidence_rad);
  if (!(s > -1.0 && s < 1.0)) fail("no real reflection angle for the centre wavelength");
}

double OpticalConfig::reflection_angle0() const { return reflect_angle(*this, signal_um, incidence_rad); }

double reflect_angle(const OpticalConfig& cfg, double lambda_um, double incidence_rad) {
  const double s = lambda_um / cfg.grating_period_um - std::sin(incidence_rad);
  if (!(s > -1.0 && s < 1.0)) {
    std::ostringstream os;
    os << "evanescent diffraction order: sin(theta_r) = " << s << " for lambda = " << lambda_um << " um";
    throw EvanescentOrderError(os.str());
  }
  return std::asin(s);
}

PlaneCoord translate_exact(const OpticalConfig& cfg, double lambda_um, PlaneCoord source) {
  const double f = cfg.focal_length_um;
  const double theta_in = cfg.incidence_rad - source.x_um / f;
  const double theta_r = reflect_angle(cfg, lambda_um, theta_in);
  return {-f * (theta_r - cfg.reflection_angle0()), source.y_um, false};
}

PlaneCoord translate_linearized(const OpticalConfig& cfg, double lambda_um, PlaneCoord source) {
  const double f = cfg.focal_length_um;
  if (std::abs(source.x_um / f) > kSmallAngleCap) {
    throw InvalidArgumentError("linearized grating map used beyond the small-angle cap");
  }
  const double cos_r0 = std::cos(cfg.reflection_angle0());
  const double x =
      (f * (cfg.signal_um - lambda_um) / cfg.grating_period_um - std::cos(cfg.incidence_rad) * source.x_um) / cos_r0;
  return {x, source.y_um, false};
}

double ring_radius(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um) {
  return cfg.focal_length_um * std::sqrt(tc.theta_squared(lambda_um));
}

double ring_abscissa(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um, double y_um,
                     Branch branch) {
  const double f = cfg.focal_length_um;
  const double radicand = f * f * tc.theta_squared(lambda_um) - y_um * y_um;
  if (radicand < 0.0) {
    std::ostringstream os;
    os << "y = " << y_um << " um lies outside the emission ring for lambda = " << lambda_um << " um";
    throw OffRingError(os.str());
  }
  const double r = std::sqrt(radicand);
  return branch == Branch::plus ? r : -r;
}

}  // namespace comet
