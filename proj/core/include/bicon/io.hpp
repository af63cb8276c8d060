#ifndef BICON_IO_HPP
#define BICON_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bicon/metrics.hpp"
#include "bicon/types.hpp"

// File formats:
//   PGM   - "P5\n<width> <height>\n255\n" followed by width*height bytes.
//           Masks use {0, 255}; maps are quantized as round(value * 255).
//   CONN  - "CONN1\n<height> <width> 8\n" followed by height*width*8
//           little-endian float32 values in (y, x, channel) order, each
//           finite and in [0, 1].
//   CSV   - fixed header row, values with six decimals.
namespace bicon {

using GrayImage = Plane<std::uint8_t>;

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

GrayImage parse_pgm(std::string_view bytes);
std::string encode_pgm(const GrayImage& image);
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

// Bytes must be 0 or 255; otherwise throws FormatError naming the count of
// offending pixels and the offset of the first one.
SaliencyMask mask_from_gray(const GrayImage& image);
GrayImage mask_to_gray(const BinaryMask& mask);
Map map_from_gray(const GrayImage& image);
GrayImage map_to_gray(const Map& map);

SaliencyMask read_mask(const std::string& path);
void write_mask(const std::string& path, const BinaryMask& mask);
Map read_map(const std::string& path);
void write_map(const std::string& path, const Map& map);

ConnGrid parse_conn(std::string_view bytes);
std::string encode_conn(const ChannelGrid& grid);
ConnGrid read_conn(const std::string& path);
void write_conn(const std::string& path, const ChannelGrid& grid);

// Values rounded through float32 exactly as a ConnFile stores them.
ChannelGrid quantize_f32(const ChannelGrid& grid);

std::string format_fixed(double value, int decimals = 6);
std::string format_hash(std::uint64_t hash);

void append_f64_le(std::string& out, double value);
double read_f64_le(std::string_view bytes, std::size_t offset);

struct NamedReport {
  std::string name;
  MetricReport report;
};

// "<key_column>,mae,f_ave,e_m" followed by one row per report.
std::string metric_table_csv(std::string_view key_column, const std::vector<NamedReport>& rows);

}  // namespace bicon

#endif  // BICON_IO_HPP
