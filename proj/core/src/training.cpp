#include "bicon/training.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "bicon/bicon_ops.hpp"
#include "bicon/conn_codec.hpp"
#include "bicon/io.hpp"
#include "bicon/random.hpp"

namespace bicon {

namespace {

constexpr std::uint64_t kShuffleStream = 0x73687566ULL;
constexpr std::string_view kCheckpointMagic = "BICONCKPT1\n";

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

std::size_t parse_count(const std::string& text, std::size_t offset) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw FormatError("checkpoint: bad count '" + text + "'", offset);
  }
  return value;
}

}  // namespace

BiconLoss connectivity_objective(LossKind kind, const ChannelGrid& conn, const ConnGrid& conn_gt,
                                 const SaliencyMask& saliency_gt, LossWeights weights) {
  switch (kind) {
    case LossKind::ConnMap: {
      GridLoss conmap = bce(conn, conn_gt);
      BiconLoss out;
      out.value.conmap = conmap.value;
      out.value.total = conmap.value;
      out.gradient = std::move(conmap.gradient);
      return out;
    }
    case LossKind::GlobalBce: {
      // The saliency term on the global map is an optional-loss hook with BCE.
      GridLoss conmap = bce(conn, conn_gt);
      const ConnGrid bicon = bilateral_vote(conn);
      MapLoss global = bce(aggregate_global(bicon), saliency_gt);
      GridGradient grad =
          bilateral_vote_backward(conn, aggregate_global_backward(conn.shape(), global.gradient));
      auto g = grad.values();
      const auto c = conmap.gradient.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += c[i];
      BiconLoss out;
      out.value.conmap = conmap.value;
      out.value.optional = global.value;
      out.value.total = conmap.value + global.value;
      out.gradient = std::move(grad);
      return out;
    }
    case LossKind::Decouple:
      return bicon_total_loss(conn, conn_gt, saliency_gt, LossWeights{1.0, 0.0});
    case LossKind::Bicon:
      return bicon_total_loss(conn, conn_gt, saliency_gt, weights);
    case LossKind::SaliencyBce:
      break;
  }
  throw InvalidArgument("connectivity_objective: loss kind needs the saliency head");
}

OutputLoss output_loss(const TrainConfig& config, const Tensor3& output,
                       const SaliencyMask& saliency_gt) {
  if (config.variant == HeadVariant::Saliency) {
    MapLoss loss = bce(to_saliency_map(output), saliency_gt);
    LossValue value;
    value.total = loss.value;
    return {value, from_map_gradient(loss.gradient)};
  }
  const ConnGrid conn = to_conn_map(output);
  const ConnGrid conn_gt = encode_connectivity(saliency_gt);
  BiconLoss loss = connectivity_objective(config.loss, conn, conn_gt, saliency_gt, config.weights);
  return {loss.value, from_grid_gradient(loss.gradient)};
}

double sample_objective(const ToyModel& model, const TrainConfig& config, const Map& image,
                        const SaliencyMask& mask, std::span<double> grad) {
  ForwardCache cache;
  const Tensor3 output = model.forward(image, grad.empty() ? nullptr : &cache);
  OutputLoss loss = output_loss(config, output, mask);
  if (!grad.empty()) model.backward(cache, loss.grad_output, grad);
  return loss.value.total;
}

LossValue backward_and_step(ToyModel& model, std::vector<double>& velocity,
                            std::span<const SyntheticSample* const> batch,
                            const TrainConfig& config) {
  if (batch.empty()) throw InvalidArgument("backward_and_step: empty batch");
  if (velocity.size() != model.parameter_count()) velocity.assign(model.parameter_count(), 0.0);
  std::vector<double> grad(model.parameter_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());

  LossValue mean;
  for (const SyntheticSample* sample : batch) {
    ForwardCache cache;
    const Tensor3 output = model.forward(sample->image, &cache);
    OutputLoss loss = output_loss(config, output, sample->mask);
    if (!std::isfinite(loss.value.total)) {
      throw NumericalError("non-finite loss on sample " + std::to_string(sample->id));
    }
    for (double& g : loss.grad_output.data) g *= scale;
    model.backward(cache, loss.grad_output, grad);
    mean.total += scale * loss.value.total;
    mean.decouple += scale * loss.value.decouple;
    mean.conmap += scale * loss.value.conmap;
    mean.bimap += scale * loss.value.bimap;
    mean.optional += scale * loss.value.optional;
  }
  if (!all_finite(grad)) throw NumericalError("non-finite parameter gradient");

  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = config.momentum * velocity[i] + grad[i];
    params[i] -= config.learning_rate * velocity[i];
  }
  return mean;
}

TrainState::TrainState(TrainConfig cfg)
    : config(cfg), model(cfg.variant, cfg.seed), velocity(model.parameter_count(), 0.0) {
  validate(config);
}

double train_epoch(TrainState& state, const std::vector<SyntheticSample>& train) {
  if (train.empty()) throw InvalidArgument("train_epoch: empty training set");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(state.config.seed, kShuffleStream + static_cast<std::uint64_t>(state.epochs_done()));
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % i);
    std::swap(order[i - 1], order[j]);
  }

  const auto batch_size = static_cast<std::size_t>(state.config.batch_size);
  std::vector<const SyntheticSample*> batch;
  double weighted = 0.0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    batch.clear();
    for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
      batch.push_back(&train[order[i]]);
    }
    const LossValue loss = backward_and_step(state.model, state.velocity, batch, state.config);
    weighted += loss.total * static_cast<double>(batch.size());
  }
  const double mean = weighted / static_cast<double>(train.size());
  state.epoch_losses.push_back(mean);
  return mean;
}

void train(TrainState& state, const std::vector<SyntheticSample>& train,
           const EpochCallback& on_epoch) {
  while (state.epochs_done() < state.config.epochs) {
    const double loss = train_epoch(state, train);
    if (on_epoch) on_epoch(state.epochs_done(), loss);
  }
}

Map infer(const ToyModel& model, const Map& image, bool use_bv) {
  if (model.variant() != HeadVariant::Connectivity) {
    throw InvalidArgument("infer: model does not have a connectivity head");
  }
  const ConnGrid conn = to_conn_map(model.forward(image));
  return use_bv ? aggregate_global(bilateral_vote(conn)) : aggregate_global(conn);
}

Map predict(const ToyModel& model, const Map& image, bool use_bv) {
  if (model.variant() == HeadVariant::Saliency) return to_saliency_map(model.forward(image));
  return infer(model, image, use_bv);
}

MetricReport evaluate_model(const ToyModel& model, const std::vector<SyntheticSample>& samples,
                            bool use_bv) {
  std::vector<std::pair<Map, SaliencyMask>> pairs;
  pairs.reserve(samples.size());
  for (const SyntheticSample& s : samples) pairs.emplace_back(predict(model, s.image, use_bv), s.mask);
  return evaluate_corpus(pairs);
}

std::vector<Experiment> component_ablation() {
  return {
      {"base", HeadVariant::Saliency, LossKind::SaliencyBce, false},
      {"conn", HeadVariant::Connectivity, LossKind::ConnMap, false},
      {"conn+bv", HeadVariant::Connectivity, LossKind::GlobalBce, true},
      {"conn+bv+rca", HeadVariant::Connectivity, LossKind::Decouple, true},
      {"bicon", HeadVariant::Connectivity, LossKind::Bicon, true},
  };
}

TrainConfig experiment_config(const TrainConfig& base, const Experiment& experiment) {
  TrainConfig config = base;
  config.variant = experiment.variant;
  config.loss = experiment.loss;
  config.inference_bv = experiment.inference_bv;
  return config;
}

namespace {

ExperimentResult run_one(const std::string& name, const TrainConfig& config,
                         const SyntheticDataset& data) {
  TrainState state(config);
  train(state, data.train);
  return {name, evaluate_model(state.model, data.test, config.inference_bv), state.epoch_losses};
}

}  // namespace

std::vector<ExperimentResult> run_ablation(const TrainConfig& base,
                                           std::span<const Experiment> experiments) {
  const SyntheticDataset data =
      generate_dataset(base.seed, base.n_train, base.n_test, base.image_size, base.image_size);
  std::vector<ExperimentResult> rows;
  for (const Experiment& e : experiments) rows.push_back(run_one(e.name, experiment_config(base, e), data));
  return rows;
}

std::vector<double> sweep_bimap_weights() {
  std::vector<double> w2;
  for (int i = 0; i < 10; ++i) w2.push_back(i / 10.0);
  return w2;
}

std::vector<ExperimentResult> run_weight_sweep(const TrainConfig& base) {
  const SyntheticDataset data =
      generate_dataset(base.seed, base.n_train, base.n_test, base.image_size, base.image_size);
  std::vector<ExperimentResult> rows;
  for (const double w2 : sweep_bimap_weights()) {
    TrainConfig config = base;
    config.variant = HeadVariant::Connectivity;
    config.loss = LossKind::Bicon;
    config.inference_bv = true;
    config.weights = {1.0 - w2, w2};
    rows.push_back(run_one(format_fixed(w2, 1), config, data));
  }
  return rows;
}

void save_checkpoint(const std::string& path, const TrainState& state) {
  std::string out(kCheckpointMagic);
  out += "config_hash=" + format_hash(config_hash(state.config)) + "\n";
  out += "params=" + std::to_string(state.model.parameter_count()) + "\n";
  out += "epochs_done=" + std::to_string(state.epochs_done()) + "\n";
  out += serialize(state.config);
  out += "end\n";
  for (const double v : state.model.parameters()) append_f64_le(out, v);
  for (const double v : state.velocity) append_f64_le(out, v);
  for (const double v : state.epoch_losses) append_f64_le(out, v);
  write_file(path, out);
}

TrainState load_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.compare(0, kCheckpointMagic.size(), kCheckpointMagic) != 0) {
    throw FormatError("checkpoint: bad magic", 0);
  }
  std::size_t pos = kCheckpointMagic.size();
  auto next_line = [&]() {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw FormatError("checkpoint: truncated header", pos);
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  auto field = [&](std::string_view key) {
    const std::size_t at = pos;
    const std::string line = next_line();
    const std::string prefix = std::string(key) + "=";
    if (line.rfind(prefix, 0) != 0) throw FormatError("checkpoint: expected " + prefix, at);
    return line.substr(prefix.size());
  };
  const std::string hash = field("config_hash");
  const std::size_t params_at = pos;
  const std::string params_text = field("params");
  const std::string epochs_text = field("epochs_done");
  std::string config_text;
  for (std::string line = next_line(); line != "end"; line = next_line()) config_text += line + "\n";

  TrainState state(parse_config(config_text));
  if (format_hash(config_hash(state.config)) != hash) {
    throw FormatError("checkpoint: config hash does not match stored config", params_at);
  }
  const std::size_t n_params = parse_count(params_text, params_at);
  const std::size_t n_epochs = parse_count(epochs_text, params_at);
  if (n_params != state.model.parameter_count()) {
    throw FormatError("checkpoint: parameter count does not match the model", params_at);
  }
  const std::size_t expected = pos + 8 * (2 * n_params + n_epochs);
  if (bytes.size() != expected) throw FormatError("checkpoint: payload size mismatch", pos);
  auto params = state.model.parameters();
  for (std::size_t i = 0; i < n_params; ++i, pos += 8) params[i] = read_f64_le(bytes, pos);
  for (std::size_t i = 0; i < n_params; ++i, pos += 8) state.velocity[i] = read_f64_le(bytes, pos);
  for (std::size_t i = 0; i < n_epochs; ++i, pos += 8) state.epoch_losses.push_back(read_f64_le(bytes, pos));
  return state;
}

}  // namespace bicon
