#include "comet/dispersion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "comet/constants.hpp"
#include "comet/error.hpp"

namespace comet {

namespace {

void require_in_range(const SellmeierSet& set, double lambda_um) {
  if (!(lambda_um >= set.lambda_min_um && lambda_um <= set.lambda_max_um)) {
    std::ostringstream os;
    os << "wavelength " << lambda_um << " um outside validity range [" << set.lambda_min_um << ", "
       << set.lambda_max_um << "] of Sellmeier set '" << set.label << "'";
    throw OutOfRangeError(os.str());
  }
}

double index_squared(const SellmeierSet& set, double lambda_um) {
  const double l2 = lambda_um * lambda_um;
  double n2 = set.constant - set.ir_term_um2inv * l2;
  for (const auto& p : set.poles) n2 += p.strength * l2 / (l2 - p.resonance_um2);
  return n2;
}

// d(n²)/dλ
double index_squared_slope(const SellmeierSet& set, double lambda_um) {
  const double l2 = lambda_um * lambda_um;
  double d = -2.0 * set.ir_term_um2inv * lambda_um;
  for (const auto& p : set.poles) {
    const double den = l2 - p.resonance_um2;
    d -= 2.0 * p.strength * p.resonance_um2 * lambda_um / (den * den);
  }
  return d;
}

}  // namespace

void SellmeierSet::validate() const {
  if (!(lambda_min_um > 0.0 && lambda_max_um > lambda_min_um) || !std::isfinite(lambda_max_um)) {
    throw InvalidArgumentError("Sellmeier set '" + label + "': invalid validity range");
  }
  for (const auto& p : poles) {
    const double pole = std::sqrt(std::abs(p.resonance_um2));
    if (p.resonance_um2 > 0.0 && pole >= lambda_min_um && pole <= lambda_max_um) {
      throw InvalidArgumentError("Sellmeier set '" + label + "': resonance inside validity range");
    }
  }
  constexpr int kProbes = 256;
  for (int k = 0; k <= kProbes; ++k) {
    const double l = lambda_min_um + (lambda_max_um - lambda_min_um) * k / kProbes;
    const double n2 = index_squared(*this, l);
    if (!std::isfinite(n2) || n2 <= 1.0) {
      throw InvalidArgumentError("Sellmeier set '" + label + "': index not real and > 1 inside range");
    }
  }
}

SellmeierSet ktp_z_fradkin_1999() {
  SellmeierSet s;
  s.label = "ktp_z_fradkin1999";
  s.constant = 2.12725;
  s.poles = {{1.18431, 5.14852e-2}, {0.6603, 100.00507}};
  s.ir_term_um2inv = 9.68956e-3;
  s.lambda_min_um = 0.50;
  s.lambda_max_um = 3.30;
  return s;
}

SellmeierSet ktp_z_kato_2002() {
  // Published as n² = 4.59423 + 0.06206/(λ² − 0.04763) + 110.80672/(λ² − 86.12171);
  // P/(λ² − Q) = (P/Q)·λ²/(λ² − Q) − P/Q.
  constexpr double p1 = 0.06206, q1 = 0.04763;
  constexpr double p2 = 110.80672, q2 = 86.12171;
  SellmeierSet s;
  s.label = "ktp_z_kato2002";
  s.constant = 4.59423 - p1 / q1 - p2 / q2;
  s.poles = {{p1 / q1, q1}, {p2 / q2, q2}};
  s.ir_term_um2inv = 0.0;
  s.lambda_min_um = 0.43;
  s.lambda_max_um = 3.54;
  return s;
}

SellmeierSet builtin_sellmeier(const std::string& label) {
  if (label == "ktp_z_fradkin1999") return ktp_z_fradkin_1999();
  if (label == "ktp_z_kato2002") return ktp_z_kato_2002();
  throw ConfigError("unknown built-in Sellmeier set '" + label + "'");
}

std::vector<std::string> builtin_sellmeier_labels() { return {"ktp_z_fradkin1999", "ktp_z_kato2002"}; }

double refractive_index(const SellmeierSet& set, double lambda_um) {
  require_in_range(set, lambda_um);
  return std::sqrt(index_squared(set, lambda_um));
}

double dn_dlambda(const SellmeierSet& set, double lambda_um) {
  require_in_range(set, lambda_um);
  return index_squared_slope(set, lambda_um) / (2.0 * std::sqrt(index_squared(set, lambda_um)));
}

double dn_domega(const SellmeierSet& set, double lambda_um) {
  if (!(lambda_um > set.lambda_min_um && lambda_um < set.lambda_max_um)) {
    require_in_range(set, lambda_um);
    throw OutOfRangeError("dn/domega needs a wavelength strictly inside the validity range");
  }
  // dλ/dω = −λ²/(2πc)
  return dn_dlambda(set, lambda_um) * (-lambda_um * lambda_um / (kTwoPi * kSpeedOfLight));
}

DispersionModel::DispersionModel(SellmeierSet set, double pump_um, double signal_um)
    : set_(std::move(set)), pump_um_(pump_um), signal_um_(signal_um), idler_um_(0.0) {
  if (!(pump_um_ > 0.0 && signal_um_ > pump_um_)) {
    throw InvalidArgumentError("dispersion model requires 0 < pump < signal wavelength");
  }
  idler_um_ = 1.0 / (1.0 / pump_um_ - 1.0 / signal_um_);
  if (!(idler_um_ > signal_um_)) {
    throw InvalidArgumentError("signal must lie on the short-wavelength side of degeneracy (idler > signal)");
  }
  set_.validate();
}

double TuningCurve::theta_squared(double lambda_um) const {
  if (lambda_um > signal_um) {
    throw InvalidArgumentError("no emission for wavelengths above the centre signal wavelength");
  }
  return b2_per_um * (signal_um - lambda_um);
}

TuningCurve tuning_curve_from_b2(double signal_um, double b2_per_um) {
  if (!(signal_um > 0.0) || !std::isfinite(b2_per_um)) {
    throw InvalidArgumentError("tuning curve needs a positive signal wavelength and finite b2");
  }
  return {signal_um, b2_per_um * signal_um * signal_um / (kTwoPi * kSpeedOfLight), b2_per_um};
}

DispersionTerms dispersion_terms(const DispersionModel& model) {
  const auto& set = model.sellmeier();
  DispersionTerms t;
  t.n_signal = refractive_index(set, model.signal_um());
  t.n_idler = refractive_index(set, model.idler_um());
  t.beta_signal_s = dn_domega(set, model.signal_um());
  t.beta_idler_s = dn_domega(set, model.idler_um());
  t.omega_signal = angular_frequency(model.signal_um());
  t.omega_idler = angular_frequency(model.idler_um());
  return t;
}

double compute_b1(const DispersionModel& model) {
  const auto t = dispersion_terms(model);
  const double ns = t.n_signal, ni = t.n_idler;
  const double ws = t.omega_signal, wi = t.omega_idler;
  const double group_difference = t.beta_signal_s * ws + ns - t.beta_idler_s * wi - ni;
  return 2.0 * ni * ns * wi * group_difference / (ws * (ws * ns + wi * ni));
}

TuningCurve compute_b2(const DispersionModel& model) {
  const double b1 = compute_b1(model);
  const double ls = model.signal_um();
  return {ls, b1, kTwoPi * kSpeedOfLight / (ls * ls) * b1};
}

double qpm_mismatch(const DispersionModel& model, double poling_period_um) {
  const auto& set = model.sellmeier();
  const double np = refractive_index(set, model.pump_um());
  const double ns = refractive_index(set, model.signal_um());
  const double ni = refractive_index(set, model.idler_um());
  const double grating = std::isinf(poling_period_um) ? 0.0 : 1.0 / poling_period_um;
  return kTwoPi * (np / model.pump_um() - ns / model.signal_um() - ni / model.idler_um() - grating);
}

double matched_poling_period(const DispersionModel& model) {
  return kTwoPi / qpm_mismatch(model, std::numeric_limits<double>::infinity());
}

}  // namespace comet
