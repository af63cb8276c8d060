#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "bicon/conn_codec.hpp"
#include "bicon/io.hpp"
#include "support/oracles.hpp"

namespace bicon {
namespace {

std::size_t offset_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no FormatError";
  return std::numeric_limits<std::size_t>::max();
}

std::string f32_bytes(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  std::string s;
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  return s;
}

TEST(Pgm, ExactHeaderAndRoundTrip) {
  GrayImage img(2, 3);
  for (std::size_t i = 0; i < img.size(); ++i) img.values()[i] = static_cast<std::uint8_t>(40 * i);
  const std::string bytes = encode_pgm(img);
  EXPECT_EQ(bytes.substr(0, 11), "P5\n3 2\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 6u);
  EXPECT_EQ(parse_pgm(bytes), img);
  EXPECT_EQ(encode_pgm(parse_pgm(bytes)), bytes);
}

TEST(Pgm, MalformedInputsReportOffsets) {
  EXPECT_EQ(offset_of([] { parse_pgm("P6\n1 1\n255\n\x01"); }), 0u);
  EXPECT_EQ(offset_of([] { parse_pgm("P5\nx 1\n255\n\x01"); }), 3u);
  EXPECT_EQ(offset_of([] { parse_pgm("P5\n1  1\n255\n\x01"); }), 5u);
  EXPECT_EQ(offset_of([] { parse_pgm("P5\n1 1\n65535\n\x01"); }), 7u);
  EXPECT_EQ(offset_of([] { parse_pgm("P5\n2 1\n255\n\x01"); }), 12u);
  EXPECT_EQ(offset_of([] { parse_pgm("P5\n1 1\n255\n\x01\x02"); }), 12u);
  EXPECT_THROW(parse_pgm("P5\n0 1\n255\n"), FormatError);
  EXPECT_THROW(parse_pgm(""), FormatError);
}

TEST(Mask, RejectsNonBinaryBytesWithCount) {
  GrayImage img(2, 2, 255);
  img(0, 1) = 7;
  img(1, 1) = 128;
  try {
    mask_from_gray(img);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("2 pixel(s)"), std::string::npos);
    EXPECT_EQ(e.offset(), encode_pgm(img).find('\x07'));
  }
  const SaliencyMask m = mask_from_gray(mask_to_gray(SaliencyMask(3, 2, 1)));
  EXPECT_EQ(m, SaliencyMask(3, 2, 1));
}

TEST(Map, QuantizationRoundsToNearest) {
  Map m(1, 4);
  m(0, 0) = 0.0;
  m(0, 1) = 0.5;
  m(0, 2) = 1.0;
  m(0, 3) = 0.2;
  const GrayImage g = map_to_gray(m);
  EXPECT_EQ(g(0, 0), 0);
  EXPECT_EQ(g(0, 1), 128);
  EXPECT_EQ(g(0, 2), 255);
  EXPECT_EQ(g(0, 3), 51);
  EXPECT_EQ(map_to_gray(map_from_gray(g)), g);
}

TEST(Conn, RoundTripIsByteIdentical) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ConnGrid g = oracle::random_grid(rng, rng.uniform_int(1, 6), rng.uniform_int(1, 6));
    const std::string bytes = encode_conn(g);
    const ConnGrid parsed = parse_conn(bytes);
    EXPECT_EQ(encode_conn(parsed), bytes);
    EXPECT_EQ(static_cast<const ChannelGrid&>(parsed), quantize_f32(g));
    EXPECT_EQ(bytes.size(), 6 + std::to_string(g.height()).size() + std::to_string(g.width()).size() +
                                4 + 32 * g.shape().pixels());
  }
  const ConnGrid labels = encode_connectivity(SaliencyMask(3, 3, 1));
  const ConnGrid parsed = parse_conn(encode_conn(labels));
  EXPECT_EQ(parsed.kind(), GridKind::BinaryMask);
  EXPECT_EQ(parsed, labels);
}

TEST(Conn, MalformedInputsReportOffsets) {
  const std::string header = "CONN1\n1 1 8\n";
  std::string payload;
  for (int i = 0; i < 8; ++i) payload += f32_bytes(0.25F);
  EXPECT_NO_THROW(parse_conn(header + payload));
  EXPECT_EQ(offset_of([&] { parse_conn("CONN2\n1 1 8\n" + payload); }), 0u);
  EXPECT_EQ(offset_of([&] { parse_conn("CONN1\n1 1 3\n" + payload); }), 10u);
  EXPECT_EQ(offset_of([&] { parse_conn(header + payload.substr(4)); }), 40u);

  std::string bad = payload;
  bad.replace(8, 4, f32_bytes(std::nanf("")));
  EXPECT_EQ(offset_of([&] { parse_conn(header + bad); }), header.size() + 8);
  bad.replace(8, 4, f32_bytes(1.5F));
  EXPECT_EQ(offset_of([&] { parse_conn(header + bad); }), header.size() + 8);
  bad.replace(8, 4, f32_bytes(-0.1F));
  EXPECT_THROW(parse_conn(header + bad), FormatError);
}

TEST(Formatting, FixedDecimalsHashAndCsv) {
  EXPECT_EQ(format_fixed(0.8), "0.800000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(0.25, 1), "0.2");
  EXPECT_EQ(format_hash(0xabcULL), "0000000000000abc");

  std::string buf;
  append_f64_le(buf, -0.1);
  EXPECT_EQ(buf.size(), 8u);
  EXPECT_EQ(read_f64_le(buf, 0), -0.1);

  const std::string csv = metric_table_csv("w2", {{"0.0", {0.01, 0.9, 0.95, 3}}, {"0.1", {0.5, 0.0, 1.0, 3}}});
  EXPECT_EQ(csv, "w2,mae,f_ave,e_m\n0.0,0.010000,0.900000,0.950000\n0.1,0.500000,0.000000,1.000000\n");
}

TEST(Files, ReadWriteAndMissingPath) {
  const std::string path = ::testing::TempDir() + "/io_round_trip.pgm";
  const SaliencyMask m = [] {
    SaliencyMask s(4, 5);
    s(1, 2) = s(2, 2) = 1;
    return s;
  }();
  write_mask(path, m);
  EXPECT_EQ(read_mask(path), m);
  EXPECT_THROW(read_file(::testing::TempDir() + "/does/not/exist.pgm"), InvalidArgument);
}

}  // namespace
}  // namespace bicon
