#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "json.hpp"

#include "comet/commands.hpp"
#include "comet/config.hpp"
#include "comet/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string mode = "post";
  std::optional<double> b2;
  std::optional<long long> seed;
  bool dump_config = false;
  std::string png;
  std::string image;
};

comet::RunConfig effective_config(const Options& opt) {
  comet::RunConfig cfg = opt.config.empty() ? comet::default_run_config() : comet::load_run_config(opt.config);
  if (opt.b2) cfg.b2_override = *opt.b2;
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.validate();
  return cfg;
}

fs::path out_or(const Options& opt, const char* fallback) { return opt.out.empty() ? fs::path(fallback) : fs::path(opt.out); }

void emit(const nlohmann::json& report) { std::cout << report.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comet-tail SPDC pattern simulator and b2 ridge fitter"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  Options opt;
  app.add_option("--config", opt.config, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output path (file, or directory for sweep)");
  app.add_option("--mode", opt.mode, "Pattern mode for simulate")->check(CLI::IsMember({"pre", "post"}));
  app.add_option("--b2", opt.b2, "Override b2 in 1/um");
  app.add_option("--seed", opt.seed, "Reserved");
  app.add_flag("--dump-config", opt.dump_config, "Print the effective config as TOML and exit");

  auto* predict = app.add_subcommand("predict", "Dispersion prediction, ridge coefficients and QPM check");
  auto* simulate = app.add_subcommand("simulate", "Render a pre- or post-grating pattern to PGM");
  simulate->add_option("--png", opt.png, "Also write an 8-bit PNG preview");
  auto* fit = app.add_subcommand("fit", "Fit the ridge of an image and estimate b2");
  fit->add_option("image", opt.image, "PGM image")->required();
  auto* tuning = app.add_subcommand("tuning-curve", "Write the tuning curve over the band as CSV");
  auto* sweep = app.add_subcommand("sweep", "Simulate and fit one comet per configured arm difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const comet::RunConfig cfg = effective_config(opt);
    if (opt.dump_config) {
      std::cout << comet::dump_run_config(cfg);
      return 0;
    }
    if (predict->parsed()) {
      const auto report = comet::commands::predict(cfg);
      if (!opt.out.empty()) {
        std::ofstream f(opt.out, std::ios::binary);
        f << report.dump(2) << '\n';
        if (!f) throw comet::IoError("failed writing '" + opt.out + "'");
      }
      emit(report);
    } else if (simulate->parsed()) {
      comet::commands::SimulateRequest req;
      req.mode = comet::parse_pattern_mode(opt.mode);
      req.out = out_or(opt, "comet.pgm");
      if (!opt.png.empty()) req.png = fs::path(opt.png);
      emit(comet::commands::simulate(cfg, req));
    } else if (fit->parsed()) {
      emit(comet::commands::fit(opt.image, cfg, out_or(opt, "fit_report.json")));
    } else if (tuning->parsed()) {
      emit(comet::commands::tuning_curve(cfg, out_or(opt, "tuning_curve.csv")));
    } else if (sweep->parsed()) {
      const auto report = comet::commands::sweep(cfg, out_or(opt, "sweep"));
      if (report.contains("warning")) std::cerr << "warning: " << report["warning"].get<std::string>() << '\n';
      emit(report);
    } else {
      std::cerr << app.help();
      return 1;
    }
  } catch (const comet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
