#ifndef BICON_CONN_CODEC_HPP
#define BICON_CONN_CODEC_HPP

#include <array>
#include <cstddef>

#include "bicon/types.hpp"

// Conversion between saliency masks and 8-channel connectivity masks.
//
// Channels are stored 0-based. Channel c here is channel c+1 in the usual
// 1-based row-major numbering (1 = upper-left ... 8 = lower-right), so the
// opposite of channel c is 7 - c (9 - j in 1-based terms).
//
// Image borders are mirrored: a neighbour coordinate of -1 maps to 0 and an
// extent of H maps to H - 1. The mirrored neighbour across a border is the
// reflection of the pixel itself, so along a reflected axis the paired
// direction keeps its sign. With this rule pair_lookup is an exact
// involution on every grid, and straight border crossings pair an entry with
// itself.
namespace bicon {

struct Direction {
  int dy;
  int dx;
  friend constexpr bool operator==(Direction, Direction) = default;
};

inline constexpr std::array<Direction, kChannels> kDirections{{
    {-1, -1}, {-1, 0}, {-1, 1},  //
    {0, -1},  {0, 1},            //
    {1, -1},  {1, 0},  {1, 1},   //
}};

constexpr int opposite_channel(int channel) { return kChannels - 1 - channel; }

// Channel index of the unit offset (dy, dx); -1 for (0, 0) or non-unit offsets.
constexpr int channel_of(int dy, int dx) {
  for (int c = 0; c < kChannels; ++c) {
    if (kDirections[c].dy == dy && kDirections[c].dx == dx) return c;
  }
  return -1;
}

// Reflect a coordinate that is at most one step outside [0, extent).
constexpr int mirror_coordinate(int v, int extent) {
  if (v < 0) return -v - 1;
  if (v >= extent) return 2 * extent - v - 1;
  return v;
}

struct GridLocation {
  int y;
  int x;
  int channel;
  friend constexpr bool operator==(GridLocation, GridLocation) = default;
};

// Partner entry of (y, x, channel) in its connectivity pair.
GridLocation pair_lookup(Shape shape, int y, int x, int channel);

// Binary connectivity mask G_C of a saliency mask. Background pixels get
// all-zero vectors; a salient pixel is connected in direction c iff its
// (mirrored) neighbour in that direction is salient.
ConnGrid encode_connectivity(const SaliencyMask& mask);

// Salient pixels with no salient mirrored 8-neighbour. They encode to
// all-zero vectors and do not survive a decode.
std::size_t count_isolated_pixels(const SaliencyMask& mask);

// Logical OR over channels. Requires a binary grid.
SaliencyMask decode_connectivity(const ConnGrid& grid);

// Pixels whose connectivity vector contains both a 0 and a 1.
EdgeMask extract_edge_mask(const ConnGrid& grid);

// True iff every entry equals its pair partner exactly.
bool is_pair_consistent(const ChannelGrid& grid);

}  // namespace bicon

#endif  // BICON_CONN_CODEC_HPP
