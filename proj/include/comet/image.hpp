#pragma once

#include <span>
#include <vector>

#include "comet/geometry.hpp"

namespace comet {

using GridSpec = DetectorGeometry;

/// Row-major intensity raster over the detection plane. Values are
/// arbitrary-unit energies per pixel.
class ImageGrid {
 public:
  ImageGrid() = default;
  explicit ImageGrid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }

  double x_at(int col) const { return spec_.origin_x_um + col * spec_.pixel_pitch_um; }
  double y_at(int row) const { return spec_.origin_y_um + row * spec_.pixel_pitch_um; }

  double& at(int col, int row) { return data_[static_cast<std::size_t>(row) * spec_.width + col]; }
  double at(int col, int row) const { return data_[static_cast<std::size_t>(row) * spec_.width + col]; }

  std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * spec_.width, row_size()}; }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * spec_.width, row_size()};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// Compensated sum of all pixels.
  double total() const;
  double max_value() const;

  /// True when every value is finite and non-negative.
  bool is_physical() const;

 private:
  std::size_t row_size() const { return static_cast<std::size_t>(spec_.width); }

  GridSpec spec_{};
  std::vector<double> data_;
};

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace comet
