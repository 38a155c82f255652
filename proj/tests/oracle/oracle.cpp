#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "comet/analysis.hpp"

namespace oracle {

namespace {

constexpr long double kC = 2.99792458e14L;  // µm/s
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

struct LinearMap {
  long double f, dg, cos_in, cos_r0, b2, s0;
};

LinearMap linear_map(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc) {
  const long double f = cfg.focal_length_um;
  const long double dg = cfg.grating_period_um;
  const long double th_in = cfg.incidence_rad;
  const long double th_r0 = std::asin(static_cast<long double>(cfg.signal_um) / dg - std::sin(th_in));
  return {f, dg, std::cos(th_in), std::cos(th_r0), tc.b2_per_um, tc.signal_um};
}

// Smallest x at detuning d on either branch; +inf off the ring.
long double map_min_x(const LinearMap& m, long double d, long double y) {
  const long double rad = m.b2 * d * m.f * m.f - y * y;
  if (rad < 0) return std::numeric_limits<long double>::infinity();
  return (m.f * d / m.dg - m.cos_in * std::sqrt(rad)) / m.cos_r0;
}

}  // namespace

OracleReport compare(std::string name, double reference, double computed, double tolerance) {
  return {std::move(name), reference, computed, tolerance, std::abs(computed - reference) <= tolerance};
}

std::vector<BruteRidgePoint> brute_ridge(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc,
                                         std::span<const double> y_um, double span_um, int samples) {
  const LinearMap m = linear_map(cfg, tc);
  std::vector<BruteRidgePoint> out;
  out.reserve(y_um.size());
  for (double y : y_um) {
    long double best = std::numeric_limits<long double>::infinity();
    long double best_d = 0;
    for (int k = 0; k < samples; ++k) {
      const long double d = span_um * static_cast<long double>(k) / (samples - 1);
      const long double x = map_min_x(m, d, y);
      if (x < best) {
        best = x;
        best_d = d;
      }
    }
    out.push_back({y, static_cast<double>(best), static_cast<double>(m.s0 - best_d)});
  }
  return out;
}

double golden_stationary_wavelength(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc, double y_um,
                                    double span_um) {
  const LinearMap m = linear_map(cfg, tc);
  const long double lo0 = static_cast<long double>(y_um) * y_um / (m.b2 * m.f * m.f);
  long double lo = lo0, hi = span_um;
  const long double g = (std::sqrt(5.0L) - 1) / 2;
  long double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  long double f1 = map_min_x(m, x1, y_um), f2 = map_min_x(m, x2, y_um);
  for (int it = 0; it < 200 && hi - lo > 1e-15L; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = map_min_x(m, x1, y_um);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = map_min_x(m, x2, y_um);
    }
  }
  return static_cast<double>(m.s0 - 0.5L * (lo + hi));
}

long double sum_exact(std::span<const double> values) {
  long double s = 0, comp = 0;
  for (double v : values) {
    const long double y = v - comp;
    const long double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

OracleReport audit_image(const comet::OpticalConfig& cfg, double lambda_um, const comet::ImageGrid& image,
                         const RemapHook& remap, comet::RemapMode mode, double rel_tol) {
  const long double in = sum_exact(image.values());
  const comet::RemapResult r = remap(cfg, lambda_um, image, mode);
  const long double out = sum_exact(r.image.values()) + r.off_grid_loss;
  const double tol = rel_tol * static_cast<double>(std::abs(in));
  return compare("remap energy", static_cast<double>(in), static_cast<double>(out), tol);
}

std::vector<OracleReport> audit_remap(const comet::OpticalConfig& cfg, const comet::TuningCurve& tc,
                                      const comet::GridSpec& grid, int trials, std::uint64_t seed,
                                      const RemapHook& remap, comet::RemapMode mode, double rel_tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<OracleReport> reports;
  reports.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const double detune = 0.03 * unit(rng);
    const double lambda = tc.signal_um - detune;
    const double radius = cfg.focal_length_um * std::sqrt(tc.b2_per_um * detune) * (0.9 + 0.2 * unit(rng));
    const double width = grid.pixel_pitch_um * (1.0 + 4.0 * unit(rng));
    const double cx = grid.pixel_pitch_um * (unit(rng) - 0.5) * 20.0;
    const double amp = 0.1 + 10.0 * unit(rng);
    comet::ImageGrid img(grid);
    for (int r = 0; r < grid.height; ++r) {
      const double y = grid.origin_y_um + r * grid.pixel_pitch_um;
      for (int c = 0; c < grid.width; ++c) {
        const double x = grid.origin_x_um + c * grid.pixel_pitch_um - cx;
        const double u = (std::hypot(x, y) - radius) / width;
        if (std::abs(u) < 6.0) img.at(c, r) = amp * std::exp(-u * u) * (0.5 + unit(rng));
      }
    }
    OracleReport rep = audit_image(cfg, lambda, img, remap, mode, rel_tol);
    rep.name = "remap energy trial " + std::to_string(t);
    reports.push_back(rep);
  }
  return reports;
}

long double index_ld(const comet::SellmeierSet& set, long double lambda_um) {
  const long double l2 = lambda_um * lambda_um;
  long double n2 = set.constant - static_cast<long double>(set.ir_term_um2inv) * l2;
  for (const auto& p : set.poles) n2 += p.strength * l2 / (l2 - p.resonance_um2);
  return std::sqrt(n2);
}

long double dn_domega_fd(const comet::SellmeierSet& set, double lambda_um, long double rel_step) {
  const long double w = 2 * kPiL * kC / lambda_um;
  const long double h = rel_step * w;
  const long double up = index_ld(set, 2 * kPiL * kC / (w + h));
  const long double dn = index_ld(set, 2 * kPiL * kC / (w - h));
  return (up - dn) / (2 * h);
}

long double dn_dlambda_fd(const comet::SellmeierSet& set, double lambda_um, long double rel_step) {
  const long double h = rel_step * lambda_um;
  return (index_ld(set, lambda_um + h) - index_ld(set, lambda_um - h)) / (2 * h);
}

long double b1_phase_matching(const comet::SellmeierSet& set, double pump_um, double signal_um,
                              long double rel_step) {
  const long double wp = 2 * kPiL * kC / pump_um;
  const long double ws = 2 * kPiL * kC / signal_um;
  const auto k = [&](long double w) { return index_ld(set, 2 * kPiL * kC / w) * w / kC; };
  const long double h = rel_step * ws;
  const auto total = [&](long double delta) { return k(ws + delta) + k(wp - ws - delta); };
  const long double dk_dw = (total(h) - total(-h)) / (2 * h);
  const long double ks = k(ws), ki = k(wp - ws);
  const long double ns = index_ld(set, signal_um);
  return 2 * ns * ns * dk_dw / (ks * (1 + ks / ki));
}

FitCalibration calibrate_fit(double a_per_um, double c_um, std::span<const double> y_um, double noise_um,
                             int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_um);
  std::vector<double> as, cs;
  FitCalibration cal;
  std::vector<comet::RidgePoint> pts(y_um.size());
  for (int t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < y_um.size(); ++i) {
      pts[i] = {y_um[i], a_per_um * y_um[i] * y_um[i] - c_um + noise(rng), 1.0, true};
    }
    const comet::RidgeFit fit = comet::fit_parabola(pts);
    as.push_back(fit.a_per_um);
    cs.push_back(fit.c_um);
    cal.mean_reported_sigma_a += fit.sigma_a / trials;
    cal.mean_reported_sigma_c += fit.sigma_c / trials;
  }
  const auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  stats(as, cal.mean_a, cal.empirical_sigma_a);
  stats(cs, cal.mean_c, cal.empirical_sigma_c);
  return cal;
}

}  // namespace oracle
