#pragma once

#include <vector>

#include "comet/dispersion.hpp"
#include "comet/geometry.hpp"
#include "comet/image.hpp"

namespace comet {

struct SpectralWeight {
  enum class Kind { flat, gaussian };
  Kind kind = Kind::flat;
  double center_um = 0.0;
  double width_um = 0.0;  // gaussian standard deviation

  double operator()(double lambda_um) const;
};

/// Uniformly sampled wavelength band, λ_k = λ_min + k·(λ_max − λ_min)/(N − 1).
struct SpectralBand {
  double lambda_min_um = 0.765;
  double lambda_max_um = 0.795;
  int samples = 2048;
  SpectralWeight weight;

  /// [λ_s0 − 30 nm, λ_s0], 2048 samples, flat.
  static SpectralBand default_for(double signal_um);

  void validate(double signal_um) const;
  double sample(int k) const;
  double spacing() const { return (lambda_max_um - lambda_min_um) / (samples - 1); }
  /// Trapezoid quadrature weight of sample k times the spectral weight.
  double quadrature_weight(int k) const;
};

/// Radial profile of a monochromatic ring as a function of
/// h = θ² − b₂(λ_s0 − λ).
struct RingProfile {
  enum class Kind { gaussian, sinc2 };
  Kind kind = Kind::gaussian;
  /// gaussian: standard deviation in θ² (rad²); sinc2: P(h) = sinc²(h/width).
  double width = 0.0;
  /// Support half-width in units of σ (gaussian) or of the first-zero
  /// distance π·width (sinc2).
  double cutoff = 5.0;

  /// Default gaussian with σ = fraction·b₂·(λ_s0 − λ_min).
  static RingProfile default_for(const TuningCurve& tc, const SpectralBand& band,
                                 double width_fraction = kDefaultWidthFraction);
  static constexpr double kDefaultWidthFraction = 0.005;

  void validate() const;
  double value(double h) const;
  double support() const;
  /// ∫ P(s − s0) ds over s ≥ 0 restricted to the support.
  double integral_above_zero(double s0) const;
};

/// Two-beam interference weight w(λ) = 1 + V·cos(2π·Δ_opt/λ + φ₀).
/// With bright_center set, φ₀ is chosen so w(λ_s0) = 1 + V.
double fringe_weight(const OpticalConfig& cfg, double lambda_um);

/// fringe_weight averaged over a wavelength bin of the given width centred on
/// λ (linear-phase approximation within the bin). Equals fringe_weight in the
/// limit of a zero-width bin.
double fringe_weight_bin_average(const OpticalConfig& cfg, double lambda_um, double bin_um);

/// Effective φ₀ used by fringe_weight.
double fringe_phase_offset(const OpticalConfig& cfg);

struct RenderedRing {
  ImageGrid image;
  /// Part of the ring support lies outside the grid.
  bool clipped = false;
  double amplitude = 0.0;
};

/// Monochromatic pre-grating ring, normalised so the un-clipped ring carries
/// energy equal to its fringe weight.
RenderedRing render_ring(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um,
                         const RingProfile& profile, const GridSpec& grid);

enum class RemapMode {
  exact,
  linearized,
  /// Plane-mirror test hook: x = x′.
  identity,
};

struct RemapResult {
  ImageGrid image;
  double off_grid_loss = 0.0;
};

/// Moves every pixel's energy to its grating-translated abscissa, split
/// linearly between the two nearest destination columns. Energy landing
/// outside the raster is accumulated in off_grid_loss.
RemapResult remap_through_grating(const OpticalConfig& cfg, double lambda_um, const ImageGrid& ring,
                                  RemapMode mode);

enum class PatternMode { pre_grating, post_grating };

struct SynthesisOptions {
  PatternMode pattern = PatternMode::post_grating;
  RemapMode remap = RemapMode::exact;
  /// 0 selects std::thread::hardware_concurrency(). Output does not depend on it.
  int threads = 0;
};

struct SynthesisResult {
  ImageGrid image;
  double off_grid_loss = 0.0;
  bool clipped = false;
};

/// Sums the rings of every band sample, remapped through the grating in
/// post-grating mode. The pre-grating field is not limited to the detector
/// frame; only the destination raster is.
SynthesisResult synthesize(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                           const RingProfile& profile, const GridSpec& grid, const SynthesisOptions& options = {});

/// Per-pixel spread of the wavelengths depositing energy after the grating.
/// Fringe modulation is not applied; only the spectral weight is.
struct LinewidthMap {
  ImageGrid linewidth_um;
  ImageGrid energy;
  std::vector<unsigned char> has_data;

  bool valid(int col, int row) const {
    return has_data[static_cast<std::size_t>(row) * linewidth_um.width() + col] != 0;
  }
  int data_count(int col) const;
  /// Median linewidth over the column's pixels with data; NaN if none.
  double column_median(int col) const;
};

LinewidthMap local_linewidth_map(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                                 const RingProfile& profile, const GridSpec& grid,
                                 RemapMode remap = RemapMode::exact, int threads = 0);

}  // namespace comet
