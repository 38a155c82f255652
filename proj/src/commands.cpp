#include "comet/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "comet/analysis.hpp"
#include "comet/constants.hpp"
#include "comet/error.hpp"
#include "comet/image_io.hpp"
#include "comet/pattern.hpp"

namespace comet::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest round-trip decimal form.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << "\r\n";
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    q.push_back('"');
    return q;
  }

  fs::path path_;
  std::ofstream out_;
};

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

json fit_json(const RidgeFit& fit) {
  return {{"a_per_um", fit.a_per_um},   {"c_um", fit.c_um},
          {"sigma_a", fit.sigma_a},     {"sigma_c", fit.sigma_c},
          {"vertex_x_um", -fit.c_um},   {"residual_rms_um", fit.residual_rms_um},
          {"points", fit.points}};
}

json estimate_json(const B2Estimate& e) {
  return {{"source", to_string(e.source)},
          {"b2_per_um", e.value},
          {"fit_sigma_per_um", e.fit_sigma},
          {"sigma_per_um", e.sigma}};
}

struct FitOutcome {
  RidgeFit fit;
  B2Estimate from_a;
  B2Estimate from_c;
  RidgeWindow window;
};

FitOutcome fit_image(const ImageGrid& image, const RunConfig& cfg) {
  FitOutcome out;
  out.window = cfg.ridge_window(cfg.tuning_curve());
  const auto points = extract_ridge(image, out.window);
  out.fit = fit_parabola(points);
  out.from_a = b2_from_a(cfg.optics, out.fit.a_per_um, out.fit.sigma_a, cfg.sigma_incidence_rad);
  out.from_c = b2_from_c(cfg.optics, out.fit.c_um, out.fit.sigma_c, cfg.sigma_incidence_rad);
  return out;
}

void write_tuning_csv(const fs::path& path, const TuningCurve& tc, const SpectralBand& band) {
  std::vector<double> lambdas(static_cast<std::size_t>(band.samples));
  for (int k = 0; k < band.samples; ++k) lambdas[static_cast<std::size_t>(k)] = band.sample(k);
  const auto curve = tuning_curve_samples(tc, lambdas);
  ensure_parent(path);
  CsvWriter csv(path);
  csv.row({"lambda_nm", "theta_mrad"});
  for (const auto& s : curve.samples) csv.row({num(s.lambda_um * kNanometresPerMicron), num(s.theta_out_rad * 1e3)});
  csv.close();
}

}  // namespace

fs::path tuning_csv_path(const fs::path& report) {
  fs::path p = report;
  p.replace_filename(report.stem().string() + "_tuning.csv");
  return p;
}

json predict(const RunConfig& cfg) {
  const DispersionModel model = cfg.dispersion();
  const DispersionTerms terms = dispersion_terms(model);
  const TuningCurve predicted = compute_b2(model);
  const TuningCurve effective = cfg.tuning_curve();
  const RidgeParabola ridge = ridge_parabola(cfg.optics, effective);
  const double detuning = effective.signal_um - stationary_wavelength(cfg.optics, effective, 0.0);

  json j;
  j["config_hash"] = config_hash(cfg);
  j["sellmeier"] = model.sellmeier().label;
  j["pump_um"] = model.pump_um();
  j["signal_um"] = model.signal_um();
  j["idler_um"] = model.idler_um();
  j["n_signal"] = terms.n_signal;
  j["n_idler"] = terms.n_idler;
  j["beta_signal_s"] = terms.beta_signal_s;
  j["beta_idler_s"] = terms.beta_idler_s;
  j["b1_s"] = predicted.b1_s;
  j["b2_per_um"] = predicted.b2_per_um;
  j["effective_b2_per_um"] = effective.b2_per_um;
  j["b2_override"] = cfg.b2_override.has_value();
  j["theta_r0_deg"] = rad_to_deg(cfg.optics.reflection_angle0());
  j["ridge"] = {{"a_per_um", ridge.a_per_um},
                {"c_um", ridge.c_um},
                {"vertex_x_um", -ridge.c_um},
                {"vertex_detuning_um", detuning}};
  j["qpm"] = {{"poling_period_um", cfg.poling_period_um},
              {"mismatch_per_um", qpm_mismatch(model, cfg.poling_period_um)},
              {"matched_period_um", matched_poling_period(model)}};
  return j;
}

json simulate(const RunConfig& cfg, const SimulateRequest& request) {
  if (request.out.empty()) throw InvalidArgumentError("simulate needs an output path");
  const TuningCurve tc = cfg.tuning_curve();
  const SynthesisResult result = synthesize(cfg.optics, tc, cfg.band(), cfg.profile(tc), cfg.optics.detector,
                                            cfg.synthesis_options(request.mode));
  ensure_parent(request.out);
  const double scale = write_pgm16(request.out, result.image);
  const std::string hash = config_hash(cfg);
  write_sidecar(request.out, {result.image.spec(), scale, to_string(request.mode), hash});

  json j;
  j["config_hash"] = hash;
  j["image"] = request.out.string();
  j["sidecar"] = sidecar_path(request.out).string();
  j["pattern_mode"] = to_string(request.mode);
  j["b2_per_um"] = tc.b2_per_um;
  j["total_energy"] = result.image.total();
  j["off_grid_loss"] = result.off_grid_loss;
  j["clipped"] = result.clipped;
  if (request.png) {
    ensure_parent(*request.png);
    write_png8(*request.png, result.image);
    j["png"] = request.png->string();
  }
  return j;
}

json fit(const fs::path& image_path, const RunConfig& cfg, const fs::path& out) {
  if (out.empty()) throw InvalidArgumentError("fit needs an output report path");
  const ImageGrid image = load_image(image_path, cfg.optics.detector);
  if (image.width() < 3 || image.height() < RidgeWindow::kMinPoints) {
    throw IoError("image '" + image_path.string() + "' is too small to fit a ridge");
  }
  const FitOutcome outcome = fit_image(image, cfg);

  const fs::path csv = tuning_csv_path(out);
  write_tuning_csv(csv, tuning_curve_from_b2(cfg.optics.signal_um, outcome.from_a.value), cfg.band());

  json j;
  j["config_hash"] = config_hash(cfg);
  j["image"] = image_path.string();
  j["window_y_max_um"] = outcome.window.y_max_um;
  j["sigma_incidence_deg"] = rad_to_deg(cfg.sigma_incidence_rad);
  j["ridge_fit"] = fit_json(outcome.fit);
  j["estimates"] = json::array({estimate_json(outcome.from_a), estimate_json(outcome.from_c)});
  j["config_b2_per_um"] = cfg.tuning_curve().b2_per_um;
  j["tuning_curve_csv"] = csv.string();

  ensure_parent(out);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write '" + out.string() + "'");
  f << j.dump(2) << '\n';
  if (!f) throw IoError("failed writing '" + out.string() + "'");
  return j;
}

json tuning_curve(const RunConfig& cfg, const fs::path& out) {
  if (out.empty()) throw InvalidArgumentError("tuning-curve needs an output path");
  const TuningCurve tc = cfg.tuning_curve();
  const SpectralBand band = cfg.band();
  band.validate(tc.signal_um);
  write_tuning_csv(out, tc, band);
  return {{"config_hash", config_hash(cfg)}, {"csv", out.string()}, {"rows", band.samples}, {"b2_per_um", tc.b2_per_um}};
}

json sweep(const RunConfig& cfg, const fs::path& out_dir) {
  json j;
  j["config_hash"] = config_hash(cfg);
  j["images"] = json::array();
  if (cfg.sweep_arm_differences_um.empty()) {
    j["warning"] = "sweep list is empty; nothing to do";
    return j;
  }
  if (out_dir.empty()) throw InvalidArgumentError("sweep needs an output directory");
  fs::create_directories(out_dir);

  const fs::path summary_path = out_dir / "summary.csv";
  CsvWriter csv(summary_path);
  csv.row({"index", "arm_difference_mm", "optical_path_difference_um", "a_per_um", "c_um", "sigma_a", "sigma_c",
           "b2_from_a_per_um", "b2_from_c_per_um", "image"});

  double a_min = INFINITY, a_max = -INFINITY, c_min = INFINITY, c_max = -INFINITY;
  const auto& arms = cfg.sweep_arm_differences_um;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    RunConfig run = cfg;
    run.set_arm_difference(arms[i]);
    std::ostringstream name;
    name << "comet_" << std::setw(3) << std::setfill('0') << i << ".pgm";
    const fs::path image_path = out_dir / name.str();

    const TuningCurve tc = run.tuning_curve();
    const SynthesisResult result = synthesize(run.optics, tc, run.band(), run.profile(tc), run.optics.detector,
                                              run.synthesis_options(PatternMode::post_grating));
    const double scale = write_pgm16(image_path, result.image);
    write_sidecar(image_path, {result.image.spec(), scale, "post", config_hash(run)});
    const FitOutcome outcome = fit_image(result.image, run);

    a_min = std::min(a_min, outcome.fit.a_per_um);
    a_max = std::max(a_max, outcome.fit.a_per_um);
    c_min = std::min(c_min, outcome.fit.c_um);
    c_max = std::max(c_max, outcome.fit.c_um);
    csv.row({std::to_string(i), num(arms[i] / kMicronsPerMillimetre), num(run.optics.optical_path_difference_um),
             num(outcome.fit.a_per_um), num(outcome.fit.c_um), num(outcome.fit.sigma_a), num(outcome.fit.sigma_c),
             num(outcome.from_a.value), num(outcome.from_c.value), name.str()});
    json entry = fit_json(outcome.fit);
    entry["arm_difference_mm"] = arms[i] / kMicronsPerMillimetre;
    entry["image"] = image_path.string();
    j["images"].push_back(entry);
  }
  csv.close();
  j["summary_csv"] = summary_path.string();
  j["relative_spread_a"] = (a_max - a_min) / (0.5 * (a_max + a_min));
  j["relative_spread_c"] = (c_max - c_min) / (0.5 * (c_max + c_min));
  return j;
}

}  // namespace comet::commands
