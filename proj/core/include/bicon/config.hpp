#ifndef BICON_CONFIG_HPP
#define BICON_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "bicon/bicon_loss.hpp"
#include "bicon/model.hpp"

namespace bicon {

// Training objective; mirrors the rows of the component ablation.
enum class LossKind {
  SaliencyBce,  // baseline: BCE(saliency map, G_S)
  ConnMap,      // BCE(C, G_C)
  GlobalBce,    // BCE(C, G_C) + BCE(global(BV(C)), G_S)
  Decouple,     // BCE(C, G_C) + L_decouple
  Bicon,        // L_decouple + w1 * BCE(C, G_C) + w2 * BCE(BV(C), G_C)
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 8;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  LossWeights weights{};
  HeadVariant variant = HeadVariant::Connectivity;
  LossKind loss = LossKind::Bicon;
  int n_train = 512;
  int n_test = 128;
  int image_size = 64;
  // Bilateral voting at inference (connectivity head only).
  bool inference_bv = true;
};

std::string_view to_string(LossKind kind);
std::string_view to_string(HeadVariant variant);
LossKind parse_loss_kind(std::string_view text);
HeadVariant parse_variant(std::string_view text);

// Throws InvalidArgument on a non-positive size, out-of-range weight or a
// loss that does not fit the head variant.
void validate(const TrainConfig& config);

// Apply one key=value setting; unknown keys and unparsable values throw.
void apply_setting(TrainConfig& config, std::string_view key, std::string_view value);

// key=value lines, '#' starts a comment, blank lines ignored. The result is
// validated.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});

// Canonical key=value serialization; parse_config(serialize(c)) == c.
std::string serialize(const TrainConfig& config);

// 64-bit FNV-1a of serialize(config).
std::uint64_t config_hash(const TrainConfig& config);

bool operator==(const TrainConfig& a, const TrainConfig& b);

}  // namespace bicon

#endif  // BICON_CONFIG_HPP
