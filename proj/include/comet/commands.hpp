#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "comet/config.hpp"

// The five command-line workflows. Each returns its JSON report and writes
// its declared files; errors propagate as comet::Error subclasses.
namespace comet::commands {

/// b₁, b₂, θ_r0, ridge coefficients, vertex and QPM diagnostic.
nlohmann::json predict(const RunConfig& cfg);

struct SimulateRequest {
  PatternMode mode = PatternMode::post_grating;
  std::filesystem::path out;
  std::optional<std::filesystem::path> png;
};

/// Writes the PGM and its sidecar (and optionally a PNG preview).
nlohmann::json simulate(const RunConfig& cfg, const SimulateRequest& request);

/// Fits the ridge of an image and writes the JSON report to `out` plus the
/// measured tuning curve to "<out stem>_tuning.csv".
nlohmann::json fit(const std::filesystem::path& image, const RunConfig& cfg, const std::filesystem::path& out);

/// Writes (lambda_nm, theta_mrad) rows over the configured band.
nlohmann::json tuning_curve(const RunConfig& cfg, const std::filesystem::path& out);

/// One comet per configured arm difference plus summary.csv in `out_dir`.
/// An empty list writes nothing and reports a warning.
nlohmann::json sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

std::filesystem::path tuning_csv_path(const std::filesystem::path& report);

}  // namespace comet::commands
