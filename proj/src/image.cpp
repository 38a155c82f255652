#include "comet/image.hpp"

#include <algorithm>
#include <cmath>

#include "comet/error.hpp"

namespace comet {

ImageGrid::ImageGrid(GridSpec spec) : spec_(spec) {
  if (spec_.width < 1 || spec_.height < 1 || !(spec_.pixel_pitch_um > 0.0)) {
    throw InvalidArgumentError("image grid needs positive dimensions and pitch");
  }
  data_.assign(static_cast<std::size_t>(spec_.width) * spec_.height, 0.0);
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double ImageGrid::total() const { return compensated_sum(data_); }

double ImageGrid::max_value() const {
  if (data_.empty()) return 0.0;
  return *std::max_element(data_.begin(), data_.end());
}

bool ImageGrid::is_physical() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v) && v >= 0.0; });
}

}  // namespace comet
