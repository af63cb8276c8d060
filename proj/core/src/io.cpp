#include "bicon/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bicon {

namespace {

constexpr std::string_view kConnMagic = "CONN1\n";

// Cursor over a header made of decimal fields separated by single spaces or
// newlines.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::size_t pos, const char* format)
      : bytes_(bytes), pos_(pos), format_(format) {}

  long number() {
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) fail("header value too large", start);
      ++pos_;
    }
    if (pos_ == start) fail("expected a decimal number in header", start);
    return v;
  }

  void expect(char c) {
    if (pos_ >= bytes_.size() || bytes_[pos_] != c) {
      fail(c == '\n' ? "expected newline in header" : "expected space in header", pos_);
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw FormatError(std::string(format_) + ": " + what, at);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
  const char* format_;
};

void append_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t read_u32_le(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::string pgm_header(int width, int height) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.substr(0, 3) != "P5\n") throw FormatError("pgm: bad magic, expected P5", 0);
  HeaderReader header(bytes, 3, "pgm");
  const long width = header.number();
  header.expect(' ');
  const long height = header.number();
  header.expect('\n');
  const std::size_t maxval_at = header.pos();
  if (header.number() != 255) header.fail("maxval must be 255", maxval_at);
  header.expect('\n');
  if (width < 1 || height < 1) header.fail("image must be non-empty", 3);

  const std::size_t payload = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t start = header.pos();
  if (bytes.size() != start + payload) {
    throw FormatError("pgm: expected " + std::to_string(payload) + " pixel bytes, found " +
                          std::to_string(bytes.size() - start),
                      std::min(bytes.size(), start + payload));
  }
  GrayImage image(static_cast<int>(height), static_cast<int>(width));
  std::memcpy(image.values().data(), bytes.data() + start, payload);
  return image;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = pgm_header(image.width(), image.height());
  const auto v = image.values();
  out.append(reinterpret_cast<const char*>(v.data()), v.size());
  return out;
}

GrayImage read_pgm(const std::string& path) { return parse_pgm(read_file(path)); }
void write_pgm(const std::string& path, const GrayImage& image) {
  write_file(path, encode_pgm(image));
}

SaliencyMask mask_from_gray(const GrayImage& image) {
  SaliencyMask mask(image.height(), image.width());
  const auto src = image.values();
  auto dst = mask.values();
  std::size_t bad = 0;
  std::size_t first_bad = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] != 0 && src[i] != 255) {
      if (bad++ == 0) first_bad = i;
    }
    dst[i] = src[i] == 255 ? 1 : 0;
  }
  if (bad != 0) {
    const std::size_t header = pgm_header(image.width(), image.height()).size();
    throw FormatError("mask: " + std::to_string(bad) + " pixel(s) are neither 0 nor 255",
                      header + first_bad);
  }
  return mask;
}

GrayImage mask_to_gray(const BinaryMask& mask) {
  GrayImage image(mask.height(), mask.width());
  const auto src = mask.values();
  auto dst = image.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  return image;
}

Map map_from_gray(const GrayImage& image) {
  Map map(image.height(), image.width());
  const auto src = image.values();
  auto dst = map.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / 255.0;
  return map;
}

GrayImage map_to_gray(const Map& map) {
  GrayImage image(map.height(), map.width());
  const auto src = map.values();
  auto dst = image.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = std::clamp(src[i], 0.0, 1.0);
    dst[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return image;
}

SaliencyMask read_mask(const std::string& path) { return mask_from_gray(read_pgm(path)); }
void write_mask(const std::string& path, const BinaryMask& mask) {
  write_pgm(path, mask_to_gray(mask));
}
Map read_map(const std::string& path) { return map_from_gray(read_pgm(path)); }
void write_map(const std::string& path, const Map& map) { write_pgm(path, map_to_gray(map)); }

ConnGrid parse_conn(std::string_view bytes) {
  if (bytes.substr(0, kConnMagic.size()) != kConnMagic) {
    throw FormatError("conn: bad magic, expected CONN1", 0);
  }
  HeaderReader header(bytes, kConnMagic.size(), "conn");
  const long height = header.number();
  header.expect(' ');
  const long width = header.number();
  header.expect(' ');
  const std::size_t channels_at = header.pos();
  if (header.number() != kChannels) header.fail("channel count must be 8", channels_at);
  header.expect('\n');
  if (height < 1 || width < 1) header.fail("grid must be non-empty", kConnMagic.size());

  const std::size_t count =
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * kChannels;
  const std::size_t start = header.pos();
  if (bytes.size() != start + 4 * count) {
    throw FormatError("conn: expected " + std::to_string(4 * count) + " payload bytes, found " +
                          std::to_string(bytes.size() - start),
                      std::min(bytes.size(), start + 4 * count));
  }
  ConnGrid grid(static_cast<int>(height), static_cast<int>(width), GridKind::ConnMap);
  auto v = grid.values();
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(read_u32_le(bytes, start + 4 * i));
    if (!std::isfinite(f) || f < 0.0F || f > 1.0F) {
      throw FormatError("conn: value outside [0, 1]", start + 4 * i);
    }
    v[i] = static_cast<double>(f);
  }
  if (grid.is_binary()) grid.set_kind(GridKind::BinaryMask);
  return grid;
}

std::string encode_conn(const ChannelGrid& grid) {
  std::string out(kConnMagic);
  out += std::to_string(grid.height()) + " " + std::to_string(grid.width()) + " 8\n";
  out.reserve(out.size() + 4 * grid.size());
  for (const double v : grid.values()) {
    append_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

ConnGrid read_conn(const std::string& path) { return parse_conn(read_file(path)); }
void write_conn(const std::string& path, const ChannelGrid& grid) {
  write_file(path, encode_conn(grid));
}

ChannelGrid quantize_f32(const ChannelGrid& grid) {
  ChannelGrid out = grid;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // Avoid emitting "-0.000000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void append_f64_le(std::string& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double read_f64_le(std::string_view bytes, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string metric_table_csv(std::string_view key_column, const std::vector<NamedReport>& rows) {
  std::string out(key_column);
  out += ",mae,f_ave,e_m\n";
  for (const NamedReport& row : rows) {
    out += row.name + "," + format_fixed(row.report.mae) + "," + format_fixed(row.report.f_ave) +
           "," + format_fixed(row.report.e_m) + "\n";
  }
  return out;
}

}  // namespace bicon
