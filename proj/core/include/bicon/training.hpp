#ifndef BICON_TRAINING_HPP
#define BICON_TRAINING_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bicon/bicon_loss.hpp"
#include "bicon/config.hpp"
#include "bicon/dataset.hpp"
#include "bicon/metrics.hpp"
#include "bicon/model.hpp"

// Training loop, inference path and experiment harnesses for the toy model.
namespace bicon {

// Loss of one sample and its gradient w.r.t. the model output tensor.
struct OutputLoss {
  LossValue value;
  Tensor3 grad_output;
};

// Objective of a connectivity-head loss kind evaluated on a Conn map.
// Every term is mean-reduced; GlobalBce and Decouple add their two terms
// unweighted.
BiconLoss connectivity_objective(LossKind kind, const ChannelGrid& conn, const ConnGrid& conn_gt,
                                 const SaliencyMask& saliency_gt, LossWeights weights);

OutputLoss output_loss(const TrainConfig& config, const Tensor3& output,
                       const SaliencyMask& saliency_gt);

// Loss of one sample w.r.t. the model parameters. grad may be empty to skip
// the backward pass; otherwise it is accumulated into.
double sample_objective(const ToyModel& model, const TrainConfig& config, const Map& image,
                        const SaliencyMask& mask, std::span<double> grad);

// One SGD-with-momentum step on the batch-mean loss:
// velocity = momentum * velocity + grad; params -= learning_rate * velocity.
// Throws NumericalError on a non-finite loss or gradient.
LossValue backward_and_step(ToyModel& model, std::vector<double>& velocity,
                            std::span<const SyntheticSample* const> batch,
                            const TrainConfig& config);

struct TrainState {
  TrainConfig config;
  ToyModel model;
  std::vector<double> velocity;
  std::vector<double> epoch_losses;  // mean total loss of every finished epoch

  explicit TrainState(TrainConfig cfg);
  int epochs_done() const { return static_cast<int>(epoch_losses.size()); }
};

// Runs one epoch in a shuffled order that depends only on (seed, epoch).
double train_epoch(TrainState& state, const std::vector<SyntheticSample>& train);

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Continues from state.epochs_done() until config.epochs.
void train(TrainState& state, const std::vector<SyntheticSample>& train,
           const EpochCallback& on_epoch = {});

// Conn map -> bilateral voting -> channel mean. Connectivity head only.
Map infer(const ToyModel& model, const Map& image, bool use_bv = true);

// Saliency prediction for either head variant.
Map predict(const ToyModel& model, const Map& image, bool use_bv = true);

MetricReport evaluate_model(const ToyModel& model, const std::vector<SyntheticSample>& samples,
                            bool use_bv = true);

struct Experiment {
  std::string name;
  HeadVariant variant;
  LossKind loss;
  bool inference_bv;
};

// Base, Conn, +BV, +RCA, full Bicon.
std::vector<Experiment> component_ablation();

TrainConfig experiment_config(const TrainConfig& base, const Experiment& experiment);

struct ExperimentResult {
  std::string name;
  MetricReport metrics;
  std::vector<double> epoch_losses;
};

std::vector<ExperimentResult> run_ablation(const TrainConfig& base,
                                           std::span<const Experiment> experiments);

// Full Bicon loss with w2 in {0, 0.1, ..., 0.9} and w1 = 1 - w2.
std::vector<double> sweep_bimap_weights();
std::vector<ExperimentResult> run_weight_sweep(const TrainConfig& base);

// Binary checkpoint carrying the config, its hash, parameters, optimizer
// velocity and the per-epoch loss history.
void save_checkpoint(const std::string& path, const TrainState& state);
TrainState load_checkpoint(const std::string& path);

}  // namespace bicon

#endif  // BICON_TRAINING_HPP
