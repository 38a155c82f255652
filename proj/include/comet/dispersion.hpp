#pragma once

#include <string>
#include <vector>

namespace comet {

/// One resonance term B·λ²/(λ² − C) of a Sellmeier expansion.
struct SellmeierPole {
  double strength = 0.0;       // B, dimensionless
  double resonance_um2 = 0.0;  // C, µm²
};

/// Refractive index of one crystal axis:
///
///   n²(λ) = A + Σ_k B_k·λ²/(λ² − C_k) − D·λ²      (λ in µm)
///
/// Evaluation is only defined inside [lambda_min_um, lambda_max_um].
struct SellmeierSet {
  std::string label;
  double constant = 1.0;  // A
  std::vector<SellmeierPole> poles;
  double ir_term_um2inv = 0.0;  // D, µm⁻²
  double lambda_min_um = 0.0;
  double lambda_max_um = 0.0;

  /// Throws InvalidArgumentError unless the range is well formed and n is
  /// real, finite and > 1 across it.
  void validate() const;
};

/// KTP z axis (n_z), Fradkin et al., Appl. Phys. Lett. 74, 914 (1999).
/// This is the built-in default.
SellmeierSet ktp_z_fradkin_1999();

/// KTP z axis, Kato & Takaoka, Appl. Opt. 41, 5040 (2002), rewritten in the
/// pole form above. Kept as a swappable alternative.
SellmeierSet ktp_z_kato_2002();

/// Looks up a built-in set by label. Throws ConfigError for unknown labels.
SellmeierSet builtin_sellmeier(const std::string& label);
std::vector<std::string> builtin_sellmeier_labels();

double refractive_index(const SellmeierSet& set, double lambda_um);

/// dn/dλ in µm⁻¹, analytic.
double dn_dlambda(const SellmeierSet& set, double lambda_um);

/// First-order dispersion coefficient β = dn/dω (seconds) at ω = 2πc/λ.
/// Requires λ strictly inside the validity range.
double dn_domega(const SellmeierSet& set, double lambda_um);

/// Type-0 down-conversion with exact energy conservation
/// 1/λ_i = 1/λ_p − 1/λ_s.
class DispersionModel {
 public:
  DispersionModel(SellmeierSet set, double pump_um, double signal_um);

  const SellmeierSet& sellmeier() const { return set_; }
  double pump_um() const { return pump_um_; }
  double signal_um() const { return signal_um_; }
  double idler_um() const { return idler_um_; }

 private:
  SellmeierSet set_;
  double pump_um_;
  double signal_um_;
  double idler_um_;
};

/// Parabolic tuning curve θ²_out = b₁·Δω = −b₂·Δλ around λ_s0. Emission
/// exists on the short-wavelength side, λ ≤ λ_s0.
struct TuningCurve {
  double signal_um = 0.0;
  double b1_s = 0.0;
  double b2_per_um = 0.0;

  /// θ²_out for λ ≤ λ_s0; throws InvalidArgumentError for λ > λ_s0.
  double theta_squared(double lambda_um) const;
};

/// Builds the curve from b₂ alone, filling in b₁ = b₂·λ_s0²/(2πc).
TuningCurve tuning_curve_from_b2(double signal_um, double b2_per_um);

/// Intermediate quantities behind b₁, for reporting.
struct DispersionTerms {
  double n_signal = 0.0;
  double n_idler = 0.0;
  double beta_signal_s = 0.0;
  double beta_idler_s = 0.0;
  double omega_signal = 0.0;
  double omega_idler = 0.0;
};

DispersionTerms dispersion_terms(const DispersionModel& model);

/// b₁ (seconds) from the signal/idler indices and their first-order
/// dispersion:
///   b₁ = 2 n_i n_s ω_i (β_s ω_s + n_s − β_i ω_i − n_i) / (ω_s (ω_s n_s + ω_i n_i))
double compute_b1(const DispersionModel& model);

/// b₂ = (2πc/λ_s0²)·b₁, packaged as a TuningCurve.
TuningCurve compute_b2(const DispersionModel& model);

/// Quasi-phase-matching residual Δk_Q = 2π(n_p/λ_p − n_s/λ_s − n_i/λ_i − 1/Λ)
/// in µm⁻¹. An infinite poling period gives the bulk mismatch.
double qpm_mismatch(const DispersionModel& model, double poling_period_um);

/// Poling period that would close the bulk mismatch exactly.
double matched_poling_period(const DispersionModel& model);

}  // namespace comet
