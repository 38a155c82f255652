#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "comet/analysis.hpp"
#include "comet/constants.hpp"
#include "comet/dispersion.hpp"
#include "comet/geometry.hpp"
#include "comet/pattern.hpp"

namespace comet {

/// Everything a command needs, in internal units. Built from a TOML file
/// (see README for the key schema) plus command-line overrides.
struct RunConfig {
  OpticalConfig optics;
  /// One-way mirror displacement; the optical path difference is twice this.
  double arm_difference_um = 250.0;
  double pump_um = 0.525;
  double poling_period_um = 9.34;
  SellmeierSet sellmeier = ktp_z_fradkin_1999();
  /// When set, replaces the b₂ predicted from dispersion.
  std::optional<double> b2_override;

  double band_span_um = 0.030;
  int band_samples = 2048;
  SpectralWeight band_weight;

  RingProfile::Kind profile_kind = RingProfile::Kind::gaussian;
  double profile_width_fraction = RingProfile::kDefaultWidthFraction;
  double profile_cutoff = 5.0;

  RemapMode remap = RemapMode::exact;
  int threads = 0;

  double ridge_y_max_um = std::numeric_limits<double>::infinity();
  double ridge_floor_fraction = 0.05;
  double sigma_incidence_rad = deg_to_rad(1.0);

  std::vector<double> sweep_arm_differences_um;
  /// Reserved; no command consumes randomness yet.
  long long seed = 0;

  /// Enforces the invariants of every module the config feeds.
  void validate() const;

  void set_arm_difference(double one_way_um);
  DispersionModel dispersion() const;
  /// b2_override if present, otherwise the dispersion prediction.
  TuningCurve tuning_curve() const;
  SpectralBand band() const;
  RingProfile profile(const TuningCurve& tc) const;
  SynthesisOptions synthesis_options(PatternMode mode) const;
  /// Ridge window: the configured |y| cap, further limited to rows whose
  /// stationary wavelength lies inside the band.
  RidgeWindow ridge_window(const TuningCurve& tc) const;
};

RunConfig default_run_config();

/// Parses TOML text. Unknown sections or keys, wrong types and invariant
/// violations raise ConfigError naming the key (and line when known).
RunConfig parse_run_config(std::string_view toml_text, std::string_view source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Effective configuration as TOML; parse_run_config(dump_run_config(c)) == c.
std::string dump_run_config(const RunConfig& cfg);

/// FNV-1a 64-bit hash of dump_run_config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::string to_string(RemapMode mode);
std::string to_string(PatternMode mode);
PatternMode parse_pattern_mode(std::string_view text);

}  // namespace comet
