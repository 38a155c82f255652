#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "comet/image.hpp"

namespace comet {

/// Physical metadata written next to every image as "<image>.json".
struct ImageSidecar {
  GridSpec grid;
  /// Intensity represented by one PGM count.
  double intensity_scale = 1.0;
  std::string pattern_mode;
  std::string config_hash;
};

std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

/// 16-bit big-endian binary PGM (P5, maxval 65535), linearly scaled so the
/// image maximum maps to 65535. Returns the intensity per count.
double write_pgm16(const std::filesystem::path& path, const ImageGrid& image);

struct PgmRaster {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> counts;
};

/// Reads binary PGM (P5) with maxval up to 65535.
PgmRaster read_pgm(const std::filesystem::path& path);

void write_sidecar(const std::filesystem::path& image_path, const ImageSidecar& meta);
std::optional<ImageSidecar> read_sidecar(const std::filesystem::path& image_path);

/// Loads a PGM into physical units. Pitch, origin and scale come from the
/// sidecar when present, otherwise from `fallback` with unit scale.
ImageGrid load_image(const std::filesystem::path& path, const GridSpec& fallback);

/// 8-bit grayscale PNG with a square-root stretch, for viewing only.
void write_png8(const std::filesystem::path& path, const ImageGrid& image);

}  // namespace comet
