#include "comet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "comet/error.hpp"

namespace comet {

namespace {

constexpr double kUmPerMm = kMicronsPerMillimetre;
constexpr double kNmPerUm = kNanometresPerMicron;

std::vector<double> default_sweep_um() {
  std::vector<double> mm = {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0};
  for (auto& v : mm) v *= kUmPerMm;
  return mm;
}

// One TOML table plus the keys consumed from it, so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string path, std::string source)
      : table_(table), path_(std::move(path)), source_(std::move(source)) {}

  bool present() const { return table_ != nullptr; }

  std::optional<double> number(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
    fail(key, node, "expected a number");
  }

  std::optional<long long> integer(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    if (!node->is_integer()) fail(key, node, "expected an integer");
    return node->value<long long>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    if (!node->is_boolean()) fail(key, node, "expected true or false");
    return node->value<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) fail(key, node, "expected a string");
    return node->value<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, node, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& el : *arr) {
      if (!(el.is_floating_point() || el.is_integer())) fail(key, &el, "expected an array of numbers");
      out.push_back(*el.value<double>());
    }
    return out;
  }

  std::optional<std::vector<SellmeierPole>> poles(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, node, "expected an array of [strength, resonance_um2] pairs");
    std::vector<SellmeierPole> out;
    for (const auto& el : *arr) {
      const toml::array* pair = el.as_array();
      if (!pair || pair->size() != 2 || !(*pair)[0].value<double>() || !(*pair)[1].value<double>()) {
        fail(key, &el, "expected an array of [strength, resonance_um2] pairs");
      }
      out.push_back({*(*pair)[0].value<double>(), *(*pair)[1].value<double>()});
    }
    return out;
  }

  Section child(const std::string& key) {
    const toml::node* node = lookup(key);
    if (!node) return {nullptr, qualified(key), source_};
    if (!node->is_table()) fail(key, node, "expected a table");
    return {node->as_table(), qualified(key), source_};
  }

  void reject_unknown() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) fail_static(qualified(key), &v, "unknown key", source_);
    }
  }

  [[noreturn]] void fail_value(const std::string& key, const std::string& what) const {
    const toml::node* node = table_ ? table_->get(key) : nullptr;
    fail_static(qualified(key), node, what, source_);
  }

  [[noreturn]] static void fail_static(const std::string& qualified, const toml::node* node, const std::string& what,
                                       const std::string& source) {
    std::ostringstream os;
    os << source << ": key '" << qualified << "'";
    if (node && node->source().begin.line > 0) os << " (line " << node->source().begin.line << ")";
    os << ": " << what;
    throw ConfigError(os.str());
  }

 private:
  const toml::node* lookup(const std::string& key) {
    used_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const toml::node* node, const std::string& what) const {
    fail_static(qualified(key), node, what, source_);
  }

  const toml::table* table_;
  std::string path_;
  std::string source_;
  std::set<std::string> used_;
};

RemapMode parse_remap(const std::string& s, Section& sec) {
  if (s == "exact") return RemapMode::exact;
  if (s == "linearized") return RemapMode::linearized;
  sec.fail_value("remap", "expected \"exact\" or \"linearized\"");
}

RingProfile::Kind parse_profile_kind(const std::string& s, Section& sec) {
  if (s == "gaussian") return RingProfile::Kind::gaussian;
  if (s == "sinc2") return RingProfile::Kind::sinc2;
  sec.fail_value("kind", "expected \"gaussian\" or \"sinc2\"");
}

template <class T>
void take(std::optional<T> v, T& dst) {
  if (v) dst = *v;
}

}  // namespace

std::string to_string(RemapMode mode) {
  switch (mode) {
    case RemapMode::exact:
      return "exact";
    case RemapMode::linearized:
      return "linearized";
    case RemapMode::identity:
      return "identity";
  }
  return "unknown";
}

std::string to_string(PatternMode mode) { return mode == PatternMode::pre_grating ? "pre" : "post"; }

PatternMode parse_pattern_mode(std::string_view text) {
  if (text == "pre") return PatternMode::pre_grating;
  if (text == "post") return PatternMode::post_grating;
  throw ConfigError("mode must be 'pre' or 'post', got '" + std::string(text) + "'");
}

void RunConfig::set_arm_difference(double one_way_um) {
  arm_difference_um = one_way_um;
  optics.optical_path_difference_um = 2.0 * one_way_um;
}

void RunConfig::validate() const {
  try {
    optics.validate();
    if (!(arm_difference_um >= 0.0) || !std::isfinite(arm_difference_um)) {
      throw InvalidArgumentError("arm difference must be >= 0");
    }
    if (!(poling_period_um > 0.0)) throw InvalidArgumentError("poling period must be > 0");
    dispersion();
    if (b2_override && !(*b2_override > 0.0)) throw InvalidArgumentError("b2 override must be > 0");
    if (!(tuning_curve().b2_per_um > 0.0)) throw InvalidArgumentError("tuning curve must have b2 > 0");
    if (!(band_span_um > 0.0 && band_span_um < optics.signal_um)) throw InvalidArgumentError("band span must be > 0");
    band().validate(optics.signal_um);
    if (!(profile_width_fraction > 0.0)) throw InvalidArgumentError("profile width fraction must be > 0");
    if (!(profile_cutoff > 0.0)) throw InvalidArgumentError("profile cutoff must be > 0");
    if (threads < 0) throw InvalidArgumentError("threads must be >= 0");
    if (!(ridge_y_max_um > 0.0)) throw InvalidArgumentError("ridge y cap must be > 0");
    if (!(ridge_floor_fraction >= 0.0 && ridge_floor_fraction < 1.0)) {
      throw InvalidArgumentError("ridge floor fraction must lie in [0, 1)");
    }
    if (!(sigma_incidence_rad >= 0.0)) throw InvalidArgumentError("incidence-angle uncertainty must be >= 0");
    for (double v : sweep_arm_differences_um) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgumentError("sweep arm differences must be >= 0");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

DispersionModel RunConfig::dispersion() const { return DispersionModel(sellmeier, pump_um, optics.signal_um); }

TuningCurve RunConfig::tuning_curve() const {
  if (b2_override) return tuning_curve_from_b2(optics.signal_um, *b2_override);
  return compute_b2(dispersion());
}

SpectralBand RunConfig::band() const {
  SpectralBand b;
  b.lambda_min_um = optics.signal_um - band_span_um;
  b.lambda_max_um = optics.signal_um;
  b.samples = band_samples;
  b.weight = band_weight;
  return b;
}

RingProfile RunConfig::profile(const TuningCurve& tc) const {
  RingProfile p = RingProfile::default_for(tc, band(), profile_width_fraction);
  p.kind = profile_kind;
  p.cutoff = profile_cutoff;
  return p;
}

SynthesisOptions RunConfig::synthesis_options(PatternMode mode) const { return {mode, remap, threads}; }

RidgeWindow RunConfig::ridge_window(const TuningCurve& tc) const {
  RidgeWindow w;
  w.floor_fraction = ridge_floor_fraction;
  const double limit = 0.95 * ridge_y_limit(optics, tc, optics.signal_um - band_span_um);
  w.y_max_um = std::min(ridge_y_max_um, limit);
  return w;
}

RunConfig default_run_config() {
  RunConfig c;
  c.optics = OpticalConfig{};
  c.optics.visibility = 0.8;
  c.optics.bright_center = true;
  c.set_arm_difference(250.0);
  c.sweep_arm_differences_um = default_sweep_um();
  return c;
}

RunConfig parse_run_config(std::string_view toml_text, std::string_view source_name) {
  const std::string source(source_name);
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ": TOML syntax error (line " << e.source().begin.line << "): " << e.description();
    throw ConfigError(os.str());
  }

  RunConfig c = default_run_config();
  Section top(&root, "", source);

  {
    Section s = top.child("optics");
    if (auto v = s.number("focal_length_mm")) c.optics.focal_length_um = *v * kUmPerMm;
    if (auto v = s.number("grating_lines_per_mm")) {
      if (!(*v > 0.0)) s.fail_value("grating_lines_per_mm", "must be > 0");
      c.optics.grating_period_um = kUmPerMm / *v;
    }
    if (auto v = s.number("incidence_deg")) c.optics.incidence_rad = deg_to_rad(*v);
    if (auto v = s.number("signal_nm")) c.optics.signal_um = *v / kNmPerUm;
    if (auto v = s.number("pump_nm")) c.pump_um = *v / kNmPerUm;
    s.reject_unknown();
  }
  {
    Section s = top.child("interferometer");
    if (auto v = s.number("arm_difference_mm")) c.set_arm_difference(*v * kUmPerMm);
    take(s.number("visibility"), c.optics.visibility);
    take(s.number("phase_offset_rad"), c.optics.phase_offset_rad);
    take(s.boolean("bright_center"), c.optics.bright_center);
    s.reject_unknown();
  }
  {
    Section s = top.child("detector");
    auto& d = c.optics.detector;
    auto w = s.integer("width_px");
    auto h = s.integer("height_px");
    auto pitch = s.number("pixel_pitch_um");
    d = DetectorGeometry::centered(static_cast<int>(w.value_or(d.width)), static_cast<int>(h.value_or(d.height)),
                                   pitch.value_or(d.pixel_pitch_um));
    take(s.number("origin_x_um"), d.origin_x_um);
    take(s.number("origin_y_um"), d.origin_y_um);
    s.reject_unknown();
  }
  {
    Section s = top.child("crystal");
    take(s.number("poling_period_um"), c.poling_period_um);
    const auto label = s.string("sellmeier");
    Section custom = s.child("custom");
    if (label && *label == "custom") {
      if (!custom.present()) s.fail_value("sellmeier", "\"custom\" requires a [crystal.custom] table");
      SellmeierSet set;
      set.label = custom.string("label").value_or("custom");
      take(custom.number("constant"), set.constant);
      take(custom.poles("poles"), set.poles);
      take(custom.number("ir_term_um2inv"), set.ir_term_um2inv);
      auto lo = custom.number("lambda_min_um");
      auto hi = custom.number("lambda_max_um");
      if (!lo || !hi) custom.fail_value("lambda_min_um", "custom Sellmeier set needs lambda_min_um and lambda_max_um");
      set.lambda_min_um = *lo;
      set.lambda_max_um = *hi;
      custom.reject_unknown();
      c.sellmeier = set;
    } else {
      if (custom.present()) s.fail_value("custom", "only allowed with sellmeier = \"custom\"");
      if (label) {
        try {
          c.sellmeier = builtin_sellmeier(*label);
        } catch (const ConfigError& e) {
          s.fail_value("sellmeier", e.what());
        }
      }
    }
    s.reject_unknown();
  }
  {
    Section s = top.child("tuning");
    if (auto v = s.number("b2_per_um")) c.b2_override = *v;
    s.reject_unknown();
  }
  {
    Section s = top.child("band");
    if (auto v = s.number("span_nm")) c.band_span_um = *v / kNmPerUm;
    if (auto v = s.integer("samples")) c.band_samples = static_cast<int>(*v);
    if (auto v = s.string("weight")) {
      if (*v == "flat") {
        c.band_weight.kind = SpectralWeight::Kind::flat;
      } else if (*v == "gaussian") {
        c.band_weight.kind = SpectralWeight::Kind::gaussian;
      } else {
        s.fail_value("weight", "expected \"flat\" or \"gaussian\"");
      }
    }
    if (auto v = s.number("weight_center_nm")) c.band_weight.center_um = *v / kNmPerUm;
    if (auto v = s.number("weight_width_nm")) c.band_weight.width_um = *v / kNmPerUm;
    s.reject_unknown();
  }
  {
    Section s = top.child("profile");
    if (auto v = s.string("kind")) c.profile_kind = parse_profile_kind(*v, s);
    take(s.number("width_fraction"), c.profile_width_fraction);
    take(s.number("cutoff"), c.profile_cutoff);
    s.reject_unknown();
  }
  {
    Section s = top.child("simulation");
    if (auto v = s.string("remap")) c.remap = parse_remap(*v, s);
    if (auto v = s.integer("threads")) c.threads = static_cast<int>(*v);
    if (auto v = s.integer("seed")) c.seed = *v;
    s.reject_unknown();
  }
  {
    Section s = top.child("analysis");
    take(s.number("ridge_y_max_um"), c.ridge_y_max_um);
    take(s.number("floor_fraction"), c.ridge_floor_fraction);
    if (auto v = s.number("sigma_incidence_deg")) c.sigma_incidence_rad = deg_to_rad(*v);
    s.reject_unknown();
  }
  {
    Section s = top.child("sweep");
    if (auto v = s.numbers("arm_differences_mm")) {
      c.sweep_arm_differences_um.clear();
      for (double mm : *v) c.sweep_arm_differences_um.push_back(mm * kUmPerMm);
    }
    s.reject_unknown();
  }
  top.reject_unknown();

  if (c.band_weight.kind == SpectralWeight::Kind::gaussian && c.band_weight.center_um == 0.0) {
    c.band_weight.center_um = c.optics.signal_um;
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

std::string dump_run_config(const RunConfig& c) {
  auto arr = [](const std::vector<double>& v, double scale) {
    toml::array a;
    for (double x : v) a.push_back(x * scale);
    return a;
  };
  const auto& d = c.optics.detector;
  toml::table root;
  root.insert("optics", toml::table{{"focal_length_mm", c.optics.focal_length_um / kUmPerMm},
                                    {"grating_lines_per_mm", kUmPerMm / c.optics.grating_period_um},
                                    {"incidence_deg", rad_to_deg(c.optics.incidence_rad)},
                                    {"signal_nm", c.optics.signal_um * kNmPerUm},
                                    {"pump_nm", c.pump_um * kNmPerUm}});
  root.insert("interferometer", toml::table{{"arm_difference_mm", c.arm_difference_um / kUmPerMm},
                                            {"visibility", c.optics.visibility},
                                            {"phase_offset_rad", c.optics.phase_offset_rad},
                                            {"bright_center", c.optics.bright_center}});
  root.insert("detector", toml::table{{"width_px", d.width},
                                      {"height_px", d.height},
                                      {"pixel_pitch_um", d.pixel_pitch_um},
                                      {"origin_x_um", d.origin_x_um},
                                      {"origin_y_um", d.origin_y_um}});
  toml::table crystal{{"poling_period_um", c.poling_period_um}};
  const auto builtins = builtin_sellmeier_labels();
  if (std::find(builtins.begin(), builtins.end(), c.sellmeier.label) != builtins.end()) {
    crystal.insert("sellmeier", c.sellmeier.label);
  } else {
    crystal.insert("sellmeier", "custom");
    toml::array poles;
    for (const auto& p : c.sellmeier.poles) poles.push_back(toml::array{p.strength, p.resonance_um2});
    crystal.insert("custom", toml::table{{"label", c.sellmeier.label},
                                         {"constant", c.sellmeier.constant},
                                         {"poles", poles},
                                         {"ir_term_um2inv", c.sellmeier.ir_term_um2inv},
                                         {"lambda_min_um", c.sellmeier.lambda_min_um},
                                         {"lambda_max_um", c.sellmeier.lambda_max_um}});
  }
  root.insert("crystal", crystal);
  toml::table tuning;
  if (c.b2_override) tuning.insert("b2_per_um", *c.b2_override);
  root.insert("tuning", tuning);
  toml::table band{{"span_nm", c.band_span_um * kNmPerUm},
                   {"samples", c.band_samples},
                   {"weight", c.band_weight.kind == SpectralWeight::Kind::flat ? "flat" : "gaussian"}};
  if (c.band_weight.kind == SpectralWeight::Kind::gaussian) {
    band.insert("weight_center_nm", c.band_weight.center_um * kNmPerUm);
    band.insert("weight_width_nm", c.band_weight.width_um * kNmPerUm);
  }
  root.insert("band", band);
  root.insert("profile", toml::table{{"kind", c.profile_kind == RingProfile::Kind::gaussian ? "gaussian" : "sinc2"},
                                     {"width_fraction", c.profile_width_fraction},
                                     {"cutoff", c.profile_cutoff}});
  root.insert("simulation",
              toml::table{{"remap", to_string(c.remap)}, {"threads", c.threads}, {"seed", static_cast<int64_t>(c.seed)}});
  toml::table analysis{{"floor_fraction", c.ridge_floor_fraction},
                       {"sigma_incidence_deg", rad_to_deg(c.sigma_incidence_rad)}};
  if (std::isfinite(c.ridge_y_max_um)) analysis.insert("ridge_y_max_um", c.ridge_y_max_um);
  root.insert("analysis", analysis);
  root.insert("sweep", toml::table{{"arm_differences_mm", arr(c.sweep_arm_differences_um, 1.0 / kUmPerMm)}});

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_run_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace comet
