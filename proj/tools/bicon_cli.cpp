// bicon: command-line front end for the connectivity codec, bilateral voting,
// aggregation, loss, metrics and the toy training pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
// 3 non-finite numbers.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bicon/bicon_loss.hpp"
#include "bicon/bicon_ops.hpp"
#include "bicon/config.hpp"
#include "bicon/conn_codec.hpp"
#include "bicon/dataset.hpp"
#include "bicon/io.hpp"
#include "bicon/metrics.hpp"
#include "bicon/training.hpp"

namespace fs = std::filesystem;
using namespace bicon;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kBadInput = 2, kNumerical = 3 };

// Input file that cannot be opened, paired or decoded.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_input(const std::string& path) {
  try {
    return read_file(path);
  } catch (const InvalidArgument& e) {
    throw InputError(e.what());
  }
}

SaliencyMask load_mask(const std::string& path) {
  return mask_from_gray(parse_pgm(read_input(path)));
}
Map load_map(const std::string& path) { return map_from_gray(parse_pgm(read_input(path))); }
ConnGrid load_conn(const std::string& path) { return parse_conn(read_input(path)); }

EdgeMask load_edges(const std::string& path) {
  const SaliencyMask m = load_mask(path);
  EdgeMask e(m.height(), m.width());
  std::copy(m.values().begin(), m.values().end(), e.values().begin());
  return e;
}

TrainState load_state(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(path);
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + " contains non-finite values");
  }
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

LossWeights parse_weights(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("--weights expects w1,w2");
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || end != part.data() + part.size() || !std::isfinite(v)) {
      throw InvalidArgument("--weights: cannot parse '" + std::string(part) + "'");
    }
    return v;
  };
  const std::string_view all(text);
  return {number(all.substr(0, comma)), number(all.substr(comma + 1))};
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    std::cout << text;
  }
}

// --- training configuration ---------------------------------------------------

struct ConfigFlags {
  std::optional<std::string> file;
  std::map<std::string, std::string> overrides;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.file, "key=value config file");
  static const char* const kKeys[] = {"epochs", "batch_size", "learning_rate", "momentum",
                                      "seed",   "w1",         "w2",            "variant",
                                      "loss",   "n_train",    "n_test",        "image_size",
                                      "inference_bv"};
  for (const char* key : kKeys) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(
        "--" + flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
        std::string("override config key ") + key);
  }
}

TrainConfig resolve_config(const ConfigFlags& flags) {
  TrainConfig config = flags.file ? load_config(*flags.file) : TrainConfig{};
  for (const auto& [key, value] : flags.overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

// --- subcommands ----------------------------------------------------------------

struct Paths {
  std::string in;
  std::string out;
};

void add_io(CLI::App* cmd, Paths& p, const char* in_help, const char* out_help) {
  cmd->add_option("input", p.in, in_help)->required();
  cmd->add_option("output", p.out, out_help)->required();
}

int run_encode(const Paths& p) {
  write_conn(p.out, encode_connectivity(load_mask(p.in)));
  return kOk;
}

int run_decode(const Paths& p) {
  ConnGrid grid = load_conn(p.in);
  if (!grid.is_binary()) {
    for (double& v : grid.values()) v = v >= 0.5 ? 1.0 : 0.0;
    grid.set_kind(GridKind::BinaryMask);
    std::cerr << "decode: non-binary input thresholded at 0.5\n";
  }
  write_mask(p.out, decode_connectivity(grid));
  return kOk;
}

int run_edges(const Paths& p) {
  write_mask(p.out, extract_edge_mask(encode_connectivity(load_mask(p.in))));
  return kOk;
}

int run_bv(const Paths& p) {
  write_conn(p.out, bilateral_vote(load_conn(p.in)));
  return kOk;
}

int run_aggregate(const Paths& p, const std::string& mode, const std::optional<std::string>& edges) {
  const ConnGrid grid = load_conn(p.in);
  if (mode == "global") {
    if (edges) throw InvalidArgument("--edges is only used with --mode decoupled");
    write_map(p.out, aggregate_global(grid));
  } else {
    if (!edges) throw InvalidArgument("--mode decoupled requires --edges");
    write_map(p.out, aggregate_decoupled(grid, load_edges(*edges)));
  }
  return kOk;
}

int run_loss(const std::string& pred_path, const std::string& gt_path, const std::string& weights,
             const std::optional<std::string>& emit_dir) {
  const LossWeights w = parse_weights(weights);
  const ConnGrid conn = load_conn(pred_path);
  const SaliencyMask gt = load_mask(gt_path);
  require_same_shape(conn.shape(), gt.shape(), "loss");
  const BiconLoss loss = bicon_total_loss(conn, encode_connectivity(gt), gt, w);
  require_finite(std::span<const double>(&loss.value.total, 1), "loss");

  std::cout << "w1=" << shortest(w.conmap) << " w2=" << shortest(w.bimap) << "\n"
            << "total=" << format_fixed(loss.value.total) << "\n"
            << "decouple=" << format_fixed(loss.value.decouple) << "\n"
            << "conmap=" << format_fixed(loss.value.conmap) << "\n"
            << "bimap=" << format_fixed(loss.value.bimap) << "\n"
            << "optional=" << format_fixed(loss.value.optional) << "\n";

  if (emit_dir) {
    fs::create_directories(*emit_dir);
    const LossSurfaces s = loss_surfaces(loss.maps);
    write_map((fs::path(*emit_dir) / "conmap_loss.pgm").string(), s.conmap);
    write_map((fs::path(*emit_dir) / "bimap_loss.pgm").string(), s.bimap);
  }
  return kOk;
}

std::vector<std::string> pgm_names(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InputError("'" + dir + "' is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::optional<std::string>& output) {
  const std::vector<std::string> preds = pgm_names(pred_dir);
  const std::vector<std::string> gts = pgm_names(gt_dir);
  std::vector<std::string> unpaired;
  std::set_symmetric_difference(preds.begin(), preds.end(), gts.begin(), gts.end(),
                                std::back_inserter(unpaired));
  if (!unpaired.empty()) {
    std::string list;
    for (const std::string& n : unpaired) list += " " + n;
    throw InputError("unpaired files:" + list);
  }
  if (preds.empty()) throw InputError("no .pgm files in '" + pred_dir + "'");

  std::vector<std::pair<Map, SaliencyMask>> pairs;
  std::vector<NamedReport> rows;
  for (const std::string& name : preds) {
    Map pred = load_map((fs::path(pred_dir) / name).string());
    SaliencyMask gt = load_mask((fs::path(gt_dir) / name).string());
    rows.push_back({name, evaluate(pred, gt)});
    pairs.emplace_back(std::move(pred), std::move(gt));
  }
  rows.push_back({"mean", evaluate_corpus(pairs)});
  write_output(output, metric_table_csv("image", rows));
  return kOk;
}

int run_train(const ConfigFlags& flags, const std::string& checkpoint,
              const std::optional<std::string>& log_path, bool resume) {
  const TrainConfig requested = resolve_config(flags);
  TrainState state = [&] {
    if (!resume) return TrainState(requested);
    TrainState loaded = load_state(checkpoint);
    TrainConfig same_length = requested;
    same_length.epochs = loaded.config.epochs;
    if (!(same_length == loaded.config)) {
      throw InvalidArgument("--resume: config differs from the checkpoint beyond epochs");
    }
    loaded.config.epochs = requested.epochs;
    return loaded;
  }();

  std::string log;
  if (resume && log_path && fs::exists(*log_path)) log = read_input(*log_path);
  if (log.empty()) log = "epoch,loss\n";
  std::cout << "config_hash=" << format_hash(config_hash(state.config)) << "\n";

  const SyntheticDataset data = generate_dataset(state.config.seed, state.config.n_train, 1,
                                                 state.config.image_size, state.config.image_size);
  train(state, data.train, [&](int epoch, double loss) {
    const std::string line = std::to_string(epoch) + "," + format_fixed(loss) + "\n";
    std::cout << "epoch " << epoch << " loss " << format_fixed(loss) << std::endl;
    log += line;
    save_checkpoint(checkpoint, state);
    if (log_path) write_file(*log_path, log);
  });
  save_checkpoint(checkpoint, state);
  if (log_path) write_file(*log_path, log);
  return kOk;
}

int run_infer(const std::string& checkpoint, const Paths& p, bool no_bv,
              const std::optional<std::string>& gt_path, const ConfigFlags& flags) {
  const TrainState state = load_state(checkpoint);
  if (flags.file || !flags.overrides.empty()) {
    const TrainConfig expected = resolve_config(flags);
    if (config_hash(expected) != config_hash(state.config)) {
      throw InputError("checkpoint config hash " + format_hash(config_hash(state.config)) +
                            " does not match " + format_hash(config_hash(expected)));
    }
  }
  const Map image = load_map(p.in);
  const Map pred = predict(state.model, image, !no_bv);
  require_finite(pred.values(), "prediction");
  write_map(p.out, pred);
  if (gt_path) {
    const MetricReport r = evaluate(map_from_gray(map_to_gray(pred)), load_mask(*gt_path));
    std::cout << "bv=" << (no_bv ? "off" : "on") << " mae=" << format_fixed(r.mae)
              << " f_ave=" << format_fixed(r.f_ave) << " e_m=" << format_fixed(r.e_m) << "\n";
  }
  return kOk;
}

std::vector<NamedReport> to_rows(const std::vector<ExperimentResult>& results) {
  std::vector<NamedReport> rows;
  for (const ExperimentResult& r : results) rows.push_back({r.name, r.metrics});
  return rows;
}

int run_ablate(const ConfigFlags& flags, const std::optional<std::string>& output) {
  const std::vector<Experiment> experiments = component_ablation();
  write_output(output, metric_table_csv("experiment", to_rows(run_ablation(resolve_config(flags),
                                                                           experiments))));
  return kOk;
}

int run_sweep(const ConfigFlags& flags, const std::optional<std::string>& output) {
  write_output(output, metric_table_csv("w2", to_rows(run_weight_sweep(resolve_config(flags)))));
  return kOk;
}

int run_synth(std::uint64_t seed, int count, int size, const std::string& split,
              const std::string& dir) {
  if (count < 1) throw InvalidArgument("--count must be positive");
  const std::uint64_t base = split == "test" ? kTestIdOffset : 0;
  fs::create_directories(fs::path(dir) / "images");
  fs::create_directories(fs::path(dir) / "masks");
  for (int i = 0; i < count; ++i) {
    const SyntheticSample s = generate_sample(seed, base + static_cast<std::uint64_t>(i), size, size);
    char name[32];
    std::snprintf(name, sizeof name, "%04d.pgm", i);
    write_map((fs::path(dir) / "images" / name).string(), s.image);
    write_mask((fs::path(dir) / "masks" / name).string(), s.mask);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connectivity-based saliency toolkit"};
  app.require_subcommand(1);

  Paths encode_p, decode_p, edges_p, bv_p, agg_p, infer_p;
  add_io(app.add_subcommand("encode", "saliency mask PGM -> connectivity ConnFile"), encode_p,
         "mask PGM", "output ConnFile");
  add_io(app.add_subcommand("decode", "ConnFile -> saliency mask PGM (0.5 threshold if non-binary)"),
         decode_p, "ConnFile", "output mask PGM");
  add_io(app.add_subcommand("edges", "saliency mask PGM -> edge mask PGM"), edges_p, "mask PGM",
         "output edge PGM");
  add_io(app.add_subcommand("bv", "bilateral voting on a ConnFile"), bv_p, "ConnFile",
         "output ConnFile");

  auto* aggregate = app.add_subcommand("aggregate", "collapse a ConnFile to a saliency map PGM");
  add_io(aggregate, agg_p, "ConnFile", "output map PGM");
  std::string agg_mode = "global";
  std::optional<std::string> agg_edges;
  aggregate->add_option("--mode", agg_mode, "global or decoupled")
      ->check(CLI::IsMember({"global", "decoupled"}));
  aggregate->add_option("--edges", agg_edges, "edge mask PGM (decoupled mode)");

  auto* loss = app.add_subcommand("loss", "Bicon loss breakdown of a predicted ConnFile");
  std::string loss_pred, loss_gt, loss_weights = "0.8,0.2";
  std::optional<std::string> emit_maps;
  loss->add_option("pred", loss_pred, "predicted ConnFile")->required();
  loss->add_option("gt", loss_gt, "ground-truth mask PGM")->required();
  loss->add_option("--weights", loss_weights, "w1,w2 (default 0.8,0.2)");
  loss->add_option("--emit-maps", emit_maps, "directory for conmap/bimap loss PGMs");

  auto* eval = app.add_subcommand("eval", "MAE / F_ave / E_m over paired PGM directories");
  std::string pred_dir, gt_dir;
  std::optional<std::string> eval_out;
  eval->add_option("pred_dir", pred_dir, "predicted maps")->required();
  eval->add_option("gt_dir", gt_dir, "ground-truth masks")->required();
  eval->add_option("--output", eval_out, "CSV report path (default stdout)");

  auto* train_cmd = app.add_subcommand("train", "train the toy model on synthetic data");
  ConfigFlags train_flags;
  std::string train_ckpt = "bicon.ckpt";
  std::optional<std::string> train_log;
  bool resume = false;
  add_config_flags(train_cmd, train_flags);
  train_cmd->add_option("--checkpoint", train_ckpt, "checkpoint path (default bicon.ckpt)");
  train_cmd->add_option("--log", train_log, "CSV training log path");
  train_cmd->add_flag("--resume", resume, "continue from --checkpoint");

  auto* infer_cmd = app.add_subcommand("infer", "predict a saliency map with a checkpoint");
  ConfigFlags infer_flags;
  std::string infer_ckpt;
  bool no_bv = false;
  std::optional<std::string> infer_gt;
  infer_cmd->add_option("--checkpoint", infer_ckpt, "checkpoint path")->required();
  add_io(infer_cmd, infer_p, "image PGM", "output map PGM");
  infer_cmd->add_flag("--no-bv", no_bv, "skip bilateral voting");
  infer_cmd->add_option("--gt", infer_gt, "mask PGM; prints metrics of the written map");
  add_config_flags(infer_cmd, infer_flags);

  auto* ablate = app.add_subcommand("ablate", "train and evaluate the component ablation");
  ConfigFlags ablate_flags;
  std::optional<std::string> ablate_out;
  add_config_flags(ablate, ablate_flags);
  ablate->add_option("--output", ablate_out, "CSV report path (default stdout)");

  auto* sweep = app.add_subcommand("sweep-weights", "train over w2 = 0, 0.1, ..., 0.9");
  ConfigFlags sweep_flags;
  std::optional<std::string> sweep_out;
  add_config_flags(sweep, sweep_flags);
  sweep->add_option("--output", sweep_out, "CSV report path (default stdout)");

  auto* synth = app.add_subcommand("synth", "write synthetic images and masks as PGM");
  std::uint64_t synth_seed = 1;
  int synth_count = 8, synth_size = 64;
  std::string synth_split = "test", synth_dir;
  synth->add_option("--seed", synth_seed, "dataset seed");
  synth->add_option("--count", synth_count, "number of samples");
  synth->add_option("--size", synth_size, "image side length")->check(CLI::Range(4, 4096));
  synth->add_option("--split", synth_split, "train or test ids")
      ->check(CLI::IsMember({"train", "test"}));
  synth->add_option("dir", synth_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("encode")) return run_encode(encode_p);
    if (app.got_subcommand("decode")) return run_decode(decode_p);
    if (app.got_subcommand("edges")) return run_edges(edges_p);
    if (app.got_subcommand("bv")) return run_bv(bv_p);
    if (app.got_subcommand("aggregate")) return run_aggregate(agg_p, agg_mode, agg_edges);
    if (app.got_subcommand("loss")) return run_loss(loss_pred, loss_gt, loss_weights, emit_maps);
    if (app.got_subcommand("eval")) return run_eval(pred_dir, gt_dir, eval_out);
    if (app.got_subcommand("train")) return run_train(train_flags, train_ckpt, train_log, resume);
    if (app.got_subcommand("infer")) {
      return run_infer(infer_ckpt, infer_p, no_bv, infer_gt, infer_flags);
    }
    if (app.got_subcommand("ablate")) return run_ablate(ablate_flags, ablate_out);
    if (app.got_subcommand("sweep-weights")) return run_sweep(sweep_flags, sweep_out);
    if (app.got_subcommand("synth")) {
      return run_synth(synth_seed, synth_count, synth_size, synth_split, synth_dir);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kUsage;
}
