#include "comet/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "comet/constants.hpp"
#include "comet/error.hpp"

namespace comet {

// ---------------------------------------------------------------------------
// Band, profile, fringes

double SpectralWeight::operator()(double lambda_um) const {
  if (kind == Kind::flat) return 1.0;
  const double d = (lambda_um - center_um) / width_um;
  return std::exp(-0.5 * d * d);
}

SpectralBand SpectralBand::default_for(double signal_um) {
  SpectralBand band;
  band.lambda_min_um = signal_um - 0.030;
  band.lambda_max_um = signal_um;
  band.samples = 2048;
  return band;
}

void SpectralBand::validate(double signal_um) const {
  if (!(lambda_min_um > 0.0 && lambda_min_um < lambda_max_um)) {
    throw InvalidArgumentError("spectral band needs 0 < lambda_min < lambda_max");
  }
  if (lambda_max_um > signal_um * (1.0 + 1e-12)) {
    throw InvalidArgumentError("spectral band must not extend above the centre signal wavelength");
  }
  if (samples < 2) throw InvalidArgumentError("spectral band needs at least 2 samples");
  if (weight.kind == SpectralWeight::Kind::gaussian && !(weight.width_um > 0.0)) {
    throw InvalidArgumentError("gaussian spectral weight needs a positive width");
  }
}

double SpectralBand::sample(int k) const {
  if (k == samples - 1) return lambda_max_um;
  return lambda_min_um + k * spacing();
}

double SpectralBand::quadrature_weight(int k) const {
  const double end = (k == 0 || k == samples - 1) ? 0.5 : 1.0;
  return end * spacing() * weight(sample(k));
}

RingProfile RingProfile::default_for(const TuningCurve& tc, const SpectralBand& band, double width_fraction) {
  RingProfile p;
  p.kind = Kind::gaussian;
  p.width = width_fraction * tc.b2_per_um * (tc.signal_um - band.lambda_min_um);
  p.cutoff = 5.0;
  return p;
}

void RingProfile::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgumentError("ring profile width must be > 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InvalidArgumentError("ring profile cutoff must be > 0");
}

double RingProfile::value(double h) const {
  if (std::abs(h) > support()) return 0.0;
  const double u = h / width;
  if (kind == Kind::gaussian) return std::exp(-0.5 * u * u);
  if (u == 0.0) return 1.0;
  const double s = std::sin(u) / u;
  return s * s;
}

double RingProfile::support() const { return kind == Kind::gaussian ? cutoff * width : cutoff * kPi * width; }

double RingProfile::integral_above_zero(double s0) const {
  const double hi = support();
  const double lo = std::max(-hi, -s0);
  if (kind == Kind::gaussian) {
    const double k = 1.0 / (width * std::sqrt(2.0));
    return width * std::sqrt(kPi / 2.0) * (std::erf(hi * k) - std::erf(lo * k));
  }
  // Composite Simpson over the truncated sinc² support.
  constexpr int n = 4096;
  const double step = (hi - lo) / n;
  double acc = value(lo) + value(hi);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * value(lo + i * step);
  return acc * step / 3.0;
}

double fringe_phase_offset(const OpticalConfig& cfg) {
  if (!cfg.bright_center) return cfg.phase_offset_rad;
  return std::remainder(-kTwoPi * cfg.optical_path_difference_um / cfg.signal_um, kTwoPi);
}

namespace {

double fringe_phase(const OpticalConfig& cfg, double lambda_um) {
  const double opd = cfg.optical_path_difference_um;
  if (cfg.bright_center) return kTwoPi * opd * (1.0 / lambda_um - 1.0 / cfg.signal_um);
  return kTwoPi * opd / lambda_um + cfg.phase_offset_rad;
}

}  // namespace

double fringe_weight(const OpticalConfig& cfg, double lambda_um) {
  return 1.0 + cfg.visibility * std::cos(fringe_phase(cfg, lambda_um));
}

double fringe_weight_bin_average(const OpticalConfig& cfg, double lambda_um, double bin_um) {
  const double half_span = kPi * cfg.optical_path_difference_um * bin_um / (lambda_um * lambda_um);
  const double washout = half_span == 0.0 ? 1.0 : std::sin(half_span) / half_span;
  return 1.0 + cfg.visibility * washout * std::cos(fringe_phase(cfg, lambda_um));
}

// ---------------------------------------------------------------------------
// Rasterization core

namespace {

struct Lattice {
  double origin_x;
  double origin_y;
  double pitch;
  int width;
  int height;
  double focal;

  explicit Lattice(const OpticalConfig& cfg, const GridSpec& g)
      : origin_x(g.origin_x_um),
        origin_y(g.origin_y_um),
        pitch(g.pixel_pitch_um),
        width(g.width),
        height(g.height),
        focal(cfg.focal_length_um) {}

  double x_at(long col) const { return origin_x + static_cast<double>(col) * pitch; }
  double y_at(int row) const { return origin_y + row * pitch; }
};

// One monochromatic ring, prepared for row-wise evaluation.
struct RingPlan {
  double lambda = 0.0;
  double center_theta2 = 0.0;
  double scale = 0.0;  // pixel value per unit profile value
  double support = 0.0;
  // Fractional destination column for source columns map_begin, map_begin+1, ...
  long map_begin = 0;
  std::vector<double> dest;
};

double destination_column(const OpticalConfig& cfg, const Lattice& lat, double lambda, long col, RemapMode mode) {
  if (mode == RemapMode::identity) return static_cast<double>(col);
  const PlaneCoord src{lat.x_at(col), 0.0, true};
  PlaneCoord out;
  if (mode == RemapMode::linearized && std::abs(src.x_um / lat.focal) <= kSmallAngleCap) {
    out = translate_linearized(cfg, lambda, src);
  } else {
    out = translate_exact(cfg, lambda, src);
  }
  return (out.x_um - lat.origin_x) / lat.pitch;
}

RingPlan make_plan(const TuningCurve& tc, const RingProfile& profile, const Lattice& lat,
                   double lambda, double amplitude) {
  RingPlan plan;
  plan.lambda = lambda;
  plan.center_theta2 = tc.theta_squared(lambda);
  plan.support = profile.support();
  const double unit_energy = kPi * lat.focal * lat.focal * profile.integral_above_zero(plan.center_theta2);
  plan.scale = amplitude * lat.pitch * lat.pitch / unit_energy;
  return plan;
}

void attach_column_map(RingPlan& plan, const OpticalConfig& cfg, const Lattice& lat, RemapMode mode) {
  const double outer = lat.focal * std::sqrt(plan.center_theta2 + plan.support);
  const long first = static_cast<long>(std::floor((-outer - lat.origin_x) / lat.pitch)) - 1;
  const long last = static_cast<long>(std::ceil((outer - lat.origin_x) / lat.pitch)) + 1;
  plan.map_begin = first;
  plan.dest.resize(static_cast<std::size_t>(last - first + 1));
  for (long j = first; j <= last; ++j) {
    plan.dest[static_cast<std::size_t>(j - first)] = destination_column(cfg, lat, plan.lambda, j, mode);
  }
}

// Calls emit(col, value) for every source column of `row` inside the ring
// support, in increasing column order. Columns are clipped to the lattice
// when clip is set.
template <class Emit>
void ring_row(const RingPlan& plan, const RingProfile& profile, const Lattice& lat, int row, bool clip, Emit&& emit) {
  const double f2 = lat.focal * lat.focal;
  const double y = lat.y_at(row);
  const double outer2 = f2 * (plan.center_theta2 + plan.support) - y * y;
  if (outer2 < 0.0) return;
  const double inner2 = f2 * (plan.center_theta2 - plan.support) - y * y;
  const double outer = std::sqrt(outer2);
  const double inner = inner2 > 0.0 ? std::sqrt(inner2) : 0.0;

  auto run = [&](double x_lo, double x_hi) {
    long j0 = static_cast<long>(std::ceil((x_lo - lat.origin_x) / lat.pitch));
    long j1 = static_cast<long>(std::floor((x_hi - lat.origin_x) / lat.pitch));
    if (clip) {
      j0 = std::max(j0, 0L);
      j1 = std::min(j1, static_cast<long>(lat.width) - 1);
    }
    for (long j = j0; j <= j1; ++j) {
      const double x = lat.x_at(j);
      const double theta2 = (x * x + y * y) / f2;
      const double v = profile.value(theta2 - plan.center_theta2);
      if (v > 0.0) emit(j, plan.scale * v);
    }
  };
  if (inner > 0.0) {
    run(-outer, -inner);
    run(inner, outer);
  } else {
    run(-outer, outer);
  }
}

bool ring_exceeds(const RingPlan& plan, const Lattice& lat) {
  const double outer = lat.focal * std::sqrt(plan.center_theta2 + plan.support);
  const double x_max = lat.x_at(lat.width - 1);
  const double y_max = lat.y_at(lat.height - 1);
  return -outer < lat.origin_x || outer > x_max || -outer < lat.origin_y || outer > y_max;
}

// Splits `value` between the two destination columns around `u`. Calls
// deposit(col, part) for in-frame parts and returns the off-grid remainder.
template <class Deposit>
double split_deposit(double u, double value, int width, Deposit&& deposit) {
  const double lo_f = std::floor(u);
  const double frac = u - lo_f;
  const long lo = static_cast<long>(lo_f);
  double lost = 0.0;
  const double left = value * (1.0 - frac);
  const double right = value - left;
  if (lo >= 0 && lo < width) {
    deposit(static_cast<int>(lo), left);
  } else {
    lost += left;
  }
  if (right != 0.0) {
    if (lo + 1 >= 0 && lo + 1 < width) {
      deposit(static_cast<int>(lo + 1), right);
    } else {
      lost += right;
    }
  }
  return lost;
}

int resolve_threads(int requested, int rows) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(rows, 1));
}

// Runs body(row_begin, row_end) over contiguous row blocks.
template <class Body>
void for_row_blocks(int rows, int threads, Body&& body) {
  const int n = resolve_threads(threads, rows);
  if (n == 1) {
    body(0, rows);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const int b = rows * t / n;
    const int e = rows * (t + 1) / n;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
}

std::vector<RingPlan> plan_band(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                                const RingProfile& profile, const Lattice& lat, bool apply_fringes) {
  std::vector<RingPlan> plans;
  plans.reserve(static_cast<std::size_t>(band.samples));
  for (int k = 0; k < band.samples; ++k) {
    const double lambda = band.sample(k);
    double amplitude = band.quadrature_weight(k);
    if (apply_fringes) amplitude *= fringe_weight_bin_average(cfg, lambda, band.spacing());
    plans.push_back(make_plan(tc, profile, lat, lambda, amplitude));
  }
  return plans;
}

void validate_inputs(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                     const RingProfile& profile) {
  cfg.validate();
  band.validate(tc.signal_um);
  profile.validate();
  if (!(tc.b2_per_um >= 0.0)) throw InvalidArgumentError("synthesis needs a non-negative b2");
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations

RenderedRing render_ring(const OpticalConfig& cfg, const TuningCurve& tc, double lambda_um,
                         const RingProfile& profile, const GridSpec& grid) {
  profile.validate();
  const Lattice lat(cfg, grid);
  RenderedRing out{ImageGrid(grid), false, fringe_weight(cfg, lambda_um)};
  const RingPlan plan = make_plan(tc, profile, lat, lambda_um, out.amplitude);
  out.clipped = ring_exceeds(plan, lat);
  if (plan.scale == 0.0) return out;
  for (int r = 0; r < grid.height; ++r) {
    auto row = out.image.row(r);
    ring_row(plan, profile, lat, r, true, [&](long j, double v) { row[static_cast<std::size_t>(j)] += v; });
  }
  return out;
}

RemapResult remap_through_grating(const OpticalConfig& cfg, double lambda_um, const ImageGrid& ring,
                                  RemapMode mode) {
  const Lattice lat(cfg, ring.spec());
  std::vector<double> dest(static_cast<std::size_t>(lat.width));
  bool any = false;
  for (double v : ring.values()) any = any || v != 0.0;
  if (any) {
    for (int j = 0; j < lat.width; ++j) dest[static_cast<std::size_t>(j)] = destination_column(cfg, lat, lambda_um, j, mode);
  }
  RemapResult out{ImageGrid(ring.spec()), 0.0};
  std::vector<double> row_loss(static_cast<std::size_t>(lat.height), 0.0);
  for (int r = 0; r < lat.height && any; ++r) {
    const auto src = ring.row(r);
    auto dst = out.image.row(r);
    for (int j = 0; j < lat.width; ++j) {
      const double v = src[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      row_loss[static_cast<std::size_t>(r)] += split_deposit(
          dest[static_cast<std::size_t>(j)], v, lat.width, [&](int c, double part) { dst[static_cast<std::size_t>(c)] += part; });
    }
  }
  out.off_grid_loss = compensated_sum(row_loss);
  return out;
}

SynthesisResult synthesize(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                           const RingProfile& profile, const GridSpec& grid, const SynthesisOptions& options) {
  validate_inputs(cfg, tc, band, profile);
  const Lattice lat(cfg, grid);
  std::vector<RingPlan> plans = plan_band(cfg, tc, band, profile, lat, true);
  const bool post = options.pattern == PatternMode::post_grating;

  SynthesisResult out{ImageGrid(grid), 0.0, false};
  for (auto& plan : plans) {
    if (post) {
      attach_column_map(plan, cfg, lat, options.remap);
    } else {
      out.clipped = out.clipped || ring_exceeds(plan, lat);
    }
  }

  std::vector<double> row_loss(static_cast<std::size_t>(lat.height), 0.0);
  for_row_blocks(lat.height, options.threads, [&](int row_begin, int row_end) {
    for (const auto& plan : plans) {
      if (plan.scale == 0.0) continue;
      for (int r = row_begin; r < row_end; ++r) {
        auto dst = out.image.row(r);
        double& loss = row_loss[static_cast<std::size_t>(r)];
        if (!post) {
          ring_row(plan, profile, lat, r, true, [&](long j, double v) { dst[static_cast<std::size_t>(j)] += v; });
          continue;
        }
        ring_row(plan, profile, lat, r, false, [&](long j, double v) {
          const double u = plan.dest[static_cast<std::size_t>(j - plan.map_begin)];
          loss += split_deposit(u, v, lat.width, [&](int c, double part) { dst[static_cast<std::size_t>(c)] += part; });
        });
      }
    }
  });
  out.off_grid_loss = compensated_sum(row_loss);
  return out;
}

int LinewidthMap::data_count(int col) const {
  int n = 0;
  for (int r = 0; r < linewidth_um.height(); ++r) n += valid(col, r) ? 1 : 0;
  return n;
}

double LinewidthMap::column_median(int col) const {
  std::vector<double> v;
  for (int r = 0; r < linewidth_um.height(); ++r) {
    if (valid(col, r)) v.push_back(linewidth_um.at(col, r));
  }
  if (v.empty()) return std::nan("");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

LinewidthMap local_linewidth_map(const OpticalConfig& cfg, const TuningCurve& tc, const SpectralBand& band,
                                 const RingProfile& profile, const GridSpec& grid, RemapMode remap, int threads) {
  validate_inputs(cfg, tc, band, profile);
  const Lattice lat(cfg, grid);
  std::vector<RingPlan> plans = plan_band(cfg, tc, band, profile, lat, false);
  for (auto& plan : plans) attach_column_map(plan, cfg, lat, remap);

  // Weighted running mean and squared deviation per pixel (West's update).
  const double ref = 0.5 * (band.lambda_min_um + band.lambda_max_um);
  ImageGrid mean(grid), m2(grid);
  LinewidthMap out{ImageGrid(grid), ImageGrid(grid), {}};
  for_row_blocks(lat.height, threads, [&](int row_begin, int row_end) {
    for (const auto& plan : plans) {
      if (plan.scale == 0.0) continue;
      const double d = plan.lambda - ref;
      for (int r = row_begin; r < row_end; ++r) {
        auto e = out.energy.row(r);
        auto mu = mean.row(r);
        auto s2 = m2.row(r);
        ring_row(plan, profile, lat, r, false, [&](long j, double v) {
          const double u = plan.dest[static_cast<std::size_t>(j - plan.map_begin)];
          split_deposit(u, v, lat.width, [&](int c, double part) {
            const auto ci = static_cast<std::size_t>(c);
            if (!(part > 0.0)) return;
            e[ci] += part;
            const double delta = d - mu[ci];
            mu[ci] += part / e[ci] * delta;
            s2[ci] += part * delta * (d - mu[ci]);
          });
        });
      }
    }
  });

  out.has_data.assign(out.energy.values().size(), 0);
  const auto energy = out.energy.values();
  const auto second = m2.values();
  auto width = out.linewidth_um.values();
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (!(energy[i] > 0.0)) continue;
    const double var = std::max(0.0, second[i] / energy[i]);
    width[i] = std::sqrt(var);
    out.has_data[i] = 1;
  }
  return out;
}

}  // namespace comet
