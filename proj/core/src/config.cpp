#include "bicon/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bicon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument("config: cannot parse '" + std::string(value) + "' for key '" +
                          std::string(key) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw InvalidArgument("config: expected boolean for key '" + std::string(key) + "'");
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::SaliencyBce: return "saliency_bce";
    case LossKind::ConnMap: return "conmap";
    case LossKind::GlobalBce: return "global_bce";
    case LossKind::Decouple: return "decouple";
    case LossKind::Bicon: return "bicon";
  }
  return "unknown";
}

std::string_view to_string(HeadVariant variant) {
  return variant == HeadVariant::Connectivity ? "connectivity" : "saliency";
}

LossKind parse_loss_kind(std::string_view text) {
  for (LossKind k : {LossKind::SaliencyBce, LossKind::ConnMap, LossKind::GlobalBce,
                     LossKind::Decouple, LossKind::Bicon}) {
    if (text == to_string(k)) return k;
  }
  throw InvalidArgument("config: unknown loss '" + std::string(text) + "'");
}

HeadVariant parse_variant(std::string_view text) {
  if (text == "connectivity") return HeadVariant::Connectivity;
  if (text == "saliency") return HeadVariant::Saliency;
  throw InvalidArgument("config: unknown variant '" + std::string(text) + "'");
}

void validate(const TrainConfig& c) {
  if (c.epochs < 1 || c.batch_size < 1 || c.n_train < 1 || c.n_test < 1) {
    throw InvalidArgument("config: epochs, batch_size, n_train and n_test must be positive");
  }
  if (c.image_size < 4) throw InvalidArgument("config: image_size must be at least 4");
  if (!(c.learning_rate >= 0.0) || !(c.momentum >= 0.0 && c.momentum < 1.0)) {
    throw InvalidArgument("config: learning_rate must be >= 0 and momentum in [0, 1)");
  }
  if (!(c.weights.conmap >= 0.0 && c.weights.conmap <= 1.0 && c.weights.bimap >= 0.0 &&
        c.weights.bimap <= 1.0)) {
    throw InvalidArgument("config: loss weights must lie in [0, 1]");
  }
  const bool saliency_loss = c.loss == LossKind::SaliencyBce;
  const bool saliency_head = c.variant == HeadVariant::Saliency;
  if (saliency_loss != saliency_head) {
    throw InvalidArgument("config: loss '" + std::string(to_string(c.loss)) +
                          "' does not match variant '" + std::string(to_string(c.variant)) + "'");
  }
}

void apply_setting(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "epochs") c.epochs = parse_number<int>(key, value);
  else if (key == "batch_size") c.batch_size = parse_number<int>(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
  else if (key == "momentum") c.momentum = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "w1") c.weights.conmap = parse_number<double>(key, value);
  else if (key == "w2") c.weights.bimap = parse_number<double>(key, value);
  else if (key == "variant") c.variant = parse_variant(value);
  else if (key == "loss") c.loss = parse_loss_kind(value);
  else if (key == "n_train") c.n_train = parse_number<int>(key, value);
  else if (key == "n_test") c.n_test = parse_number<int>(key, value);
  else if (key == "image_size") c.image_size = parse_number<int>(key, value);
  else if (key == "inference_bv") c.inference_bv = parse_bool(key, value);
  else throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config: line " + std::to_string(line_no) + " is not key=value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(base);
  return base;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base);
}

std::string serialize(const TrainConfig& c) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(key).append("=").append(value).append("\n");
  };
  line("epochs", std::to_string(c.epochs));
  line("batch_size", std::to_string(c.batch_size));
  line("learning_rate", format_double(c.learning_rate));
  line("momentum", format_double(c.momentum));
  line("seed", std::to_string(c.seed));
  line("w1", format_double(c.weights.conmap));
  line("w2", format_double(c.weights.bimap));
  line("variant", std::string(to_string(c.variant)));
  line("loss", std::string(to_string(c.loss)));
  line("n_train", std::to_string(c.n_train));
  line("n_test", std::to_string(c.n_test));
  line("image_size", std::to_string(c.image_size));
  line("inference_bv", c.inference_bv ? "true" : "false");
  return out;
}

std::uint64_t config_hash(const TrainConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool operator==(const TrainConfig& a, const TrainConfig& b) { return serialize(a) == serialize(b); }

}  // namespace bicon
