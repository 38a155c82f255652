#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "comet/dispersion.hpp"
#include "comet/geometry.hpp"
#include "comet/image.hpp"
#include "comet/pattern.hpp"

// Brute-force reference computations for the test suite. Nothing here calls
// the production formulas it is used to check.
namespace oracle {

struct OracleReport {
  std::string name;
  double reference = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

OracleReport compare(std::string name, double reference, double computed, double tolerance);

struct BruteRidgePoint {
  double y_um = 0.0;
  double x_um = 0.0;
  double lambda_um = 0.0;
};

/// For each y, scans λ_s0 − λ over [0, span_um] on `samples` points and keeps
/// the smallest x on either branch of the linearized comet map.
std::vector<BruteRidgePoint> brute_ridge(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc,
                                         std::span<const double> y_um, double span_um = 0.05,
                                         int samples = 100000);

/// Golden-section minimum of the ridge-branch x over λ at fixed y.
double golden_stationary_wavelength(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc, double y_um,
                                    double span_um = 0.05);

using RemapHook = std::function<comet::RemapResult(const comet::OpticalConfig&, double, const comet::ImageGrid&,
                                                   comet::RemapMode)>;

/// Random rings (random wavelength, radius jitter, amplitudes) pushed through
/// `remap`; each trial checks input = output + off-grid at `rel_tol`.
std::vector<OracleReport> audit_remap(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc,
                                      const comet::GridSpec& grid, int trials, std::uint64_t seed,
                                      const RemapHook& remap, comet::RemapMode mode = comet::RemapMode::exact,
                                      double rel_tol = 1e-9);

/// Same bookkeeping for one given image.
OracleReport audit_image(const comet::OpticalConfig& cfg, double lambda_um, const comet::ImageGrid& image,
                         const RemapHook& remap, comet::RemapMode mode, double rel_tol = 1e-9);

long double sum_exact(std::span<const double> values);

/// Sellmeier n(λ) evaluated in long double.
long double index_ld(const comet::SellmeierSet& set, long double lambda_um);
/// Central difference of n in ω with Δω = rel_step·ω.
long double dn_domega_fd(const comet::SellmeierSet& set, double lambda_um, long double rel_step = 1e-6L);
/// Central difference of n in λ.
long double dn_dlambda_fd(const comet::SellmeierSet& set, double lambda_um, long double rel_step = 1e-6L);

/// b₁ from small-angle transverse/longitudinal momentum matching:
/// θ_out² = 2n_s²·Δk(δ)/(k_s(1 + k_s/k_i)) with δ the signal frequency shift
/// at fixed pump, differenced symmetrically.
long double b1_phase_matching(const comet::SellmeierSet& set, double pump_um, double signal_um,
                              long double rel_step = 1e-6L);

struct FitCalibration {
  double empirical_sigma_a = 0.0;
  double empirical_sigma_c = 0.0;
  double mean_reported_sigma_a = 0.0;
  double mean_reported_sigma_c = 0.0;
  double mean_a = 0.0;
  double mean_c = 0.0;
};

/// Fits `trials` noisy copies of x = a·y² − c with Gaussian x noise of
/// `noise_um` and unit weights.
FitCalibration calibrate_fit(double a_per_um, double c_um, std::span<const double> y_um, double noise_um,
                             int trials, std::uint64_t seed);

}  // namespace oracle
