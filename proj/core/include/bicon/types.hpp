#ifndef BICON_TYPES_HPP
#define BICON_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bicon/errors.hpp"

namespace bicon {

// Number of connectivity directions in the 8-neighbour system.
inline constexpr int kChannels = 8;

struct Shape {
  int height = 0;
  int width = 0;

  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  bool empty() const { return height <= 0 || width <= 0; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense row-major H x W plane.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int height, int width, T fill = T{})
      : shape_{height, width}, data_(checked_size(height, width), fill) {}

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int y, int x) { return data_[index(y, x)]; }
  const T& operator()(int y, int x) const { return data_[index(y, x)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static std::size_t checked_size(int height, int width) {
    if (height < 0 || width < 0) throw InvalidArgument("negative plane extent");
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
           static_cast<std::size_t>(x);
  }

  Shape shape_;
  std::vector<T> data_;
};

// Continuous single-channel map (saliency prediction, aggregated map, image).
using Map = Plane<double>;

// Binary plane with values in {0, 1}.
class BinaryMask : public Plane<std::uint8_t> {
 public:
  using Plane<std::uint8_t>::Plane;

  bool is_binary() const;
  // Throws InvalidArgument unless every value is 0 or 1 and the mask is non-empty.
  void validate(const char* what) const;
  std::size_t count() const;
};

// Ground-truth saliency mask G_S.
class SaliencyMask : public BinaryMask {
 public:
  using BinaryMask::BinaryMask;
};

// Pixels whose ground-truth connectivity vector mixes zeros and ones.
class EdgeMask : public BinaryMask {
 public:
  using BinaryMask::BinaryMask;
};

// H x W x 8 tensor of reals stored with the channel index fastest.
class ChannelGrid {
 public:
  ChannelGrid() = default;
  ChannelGrid(int height, int width, double fill = 0.0);
  explicit ChannelGrid(Shape shape, double fill = 0.0)
      : ChannelGrid(shape.height, shape.width, fill) {}

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int y, int x, int c) { return data_[index(y, x, c)]; }
  double operator()(int y, int x, int c) const { return data_[index(y, x, c)]; }

  // The 8-entry connectivity vector at (y, x).
  std::span<double, kChannels> vector_at(int y, int x) {
    return std::span<double, kChannels>(data_.data() + index(y, x, 0), kChannels);
  }
  std::span<const double, kChannels> vector_at(int y, int x) const {
    return std::span<const double, kChannels>(data_.data() + index(y, x, 0), kChannels);
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
            static_cast<std::size_t>(x)) *
               kChannels +
           static_cast<std::size_t>(c);
  }

  friend bool operator==(const ChannelGrid&, const ChannelGrid&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Vector-Jacobian products of grid-valued operations carry no range restriction.
using GridGradient = ChannelGrid;

enum class GridKind { BinaryMask, ConnMap, BiconMap };

// Connectivity mask G_C, Conn map C or Bicon map, depending on kind().
class ConnGrid : public ChannelGrid {
 public:
  ConnGrid() = default;
  ConnGrid(int height, int width, GridKind kind, double fill = 0.0)
      : ChannelGrid(height, width, fill), kind_(kind) {}
  ConnGrid(ChannelGrid values, GridKind kind) : ChannelGrid(std::move(values)), kind_(kind) {}

  GridKind kind() const { return kind_; }
  void set_kind(GridKind kind) { kind_ = kind; }

  bool is_binary() const;
  bool in_unit_range() const;

  friend bool operator==(const ConnGrid&, const ConnGrid&) = default;

 private:
  GridKind kind_ = GridKind::ConnMap;
};

void require_same_shape(Shape a, Shape b, const char* what);

}  // namespace bicon

#endif  // BICON_TYPES_HPP
