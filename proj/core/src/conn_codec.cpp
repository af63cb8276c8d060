#include "bicon/conn_codec.hpp"

#include <algorithm>

namespace bicon {

GridLocation pair_lookup(Shape shape, int y, int x, int channel) {
  const Direction d = kDirections[channel];
  int ny = y + d.dy;
  int nx = x + d.dx;
  // Partner direction points back at (y, x); a reflected axis flips it again.
  int pdy = -d.dy;
  int pdx = -d.dx;
  if (ny < 0 || ny >= shape.height) {
    ny = mirror_coordinate(ny, shape.height);
    pdy = d.dy;
  }
  if (nx < 0 || nx >= shape.width) {
    nx = mirror_coordinate(nx, shape.width);
    pdx = d.dx;
  }
  return {ny, nx, channel_of(pdy, pdx)};
}

ConnGrid encode_connectivity(const SaliencyMask& mask) {
  mask.validate("encode_connectivity");
  const int h = mask.height();
  const int w = mask.width();
  ConnGrid grid(h, w, GridKind::BinaryMask);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) == 0) continue;
      for (int c = 0; c < kChannels; ++c) {
        const int ny = mirror_coordinate(y + kDirections[c].dy, h);
        const int nx = mirror_coordinate(x + kDirections[c].dx, w);
        grid(y, x, c) = mask(ny, nx) != 0 ? 1.0 : 0.0;
      }
    }
  }
  return grid;
}

std::size_t count_isolated_pixels(const SaliencyMask& mask) {
  mask.validate("count_isolated_pixels");
  const int h = mask.height();
  const int w = mask.width();
  std::size_t isolated = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) == 0) continue;
      bool any = false;
      for (const Direction d : kDirections) {
        any = any || mask(mirror_coordinate(y + d.dy, h), mirror_coordinate(x + d.dx, w)) != 0;
      }
      if (!any) ++isolated;
    }
  }
  return isolated;
}

SaliencyMask decode_connectivity(const ConnGrid& grid) {
  if (grid.shape().empty()) throw InvalidArgument("decode_connectivity: empty grid");
  if (!grid.is_binary()) throw InvalidArgument("decode_connectivity: grid is not binary");
  SaliencyMask mask(grid.height(), grid.width());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const auto v = grid.vector_at(y, x);
      mask(y, x) = std::any_of(v.begin(), v.end(), [](double e) { return e != 0.0; }) ? 1 : 0;
    }
  }
  return mask;
}

EdgeMask extract_edge_mask(const ConnGrid& grid) {
  if (grid.shape().empty()) throw InvalidArgument("extract_edge_mask: empty grid");
  if (!grid.is_binary()) throw InvalidArgument("extract_edge_mask: grid is not binary");
  EdgeMask edges(grid.height(), grid.width());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const auto v = grid.vector_at(y, x);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      edges(y, x) = *lo < *hi ? 1 : 0;
    }
  }
  return edges;
}

bool is_pair_consistent(const ChannelGrid& grid) {
  const Shape shape = grid.shape();
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      for (int c = 0; c < kChannels; ++c) {
        const GridLocation p = pair_lookup(shape, y, x, c);
        if (grid(y, x, c) != grid(p.y, p.x, p.channel)) return false;
      }
    }
  }
  return true;
}

}  // namespace bicon
