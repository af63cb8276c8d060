#include "bicon/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bicon {

bool BinaryMask::is_binary() const {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [](std::uint8_t e) { return e <= 1; });
}

void BinaryMask::validate(const char* what) const {
  if (shape().empty()) throw InvalidArgument(std::string(what) + ": empty mask");
  if (!is_binary()) throw InvalidArgument(std::string(what) + ": mask is not binary");
}

std::size_t BinaryMask::count() const {
  const auto v = values();
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
}

ChannelGrid::ChannelGrid(int height, int width, double fill) : shape_{height, width} {
  if (height < 0 || width < 0) throw InvalidArgument("negative grid extent");
  data_.assign(shape_.pixels() * kChannels, fill);
}

bool ConnGrid::is_binary() const {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0 || e == 1.0; });
}

bool ConnGrid::in_unit_range() const {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [](double e) { return e >= 0.0 && e <= 1.0; });
}

void require_same_shape(Shape a, Shape b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": shape mismatch (" + std::to_string(a.height) +
                          "x" + std::to_string(a.width) + " vs " + std::to_string(b.height) +
                          "x" + std::to_string(b.width) + ")");
  }
}

}  // namespace bicon
