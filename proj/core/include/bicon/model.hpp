#ifndef BICON_MODEL_HPP
#define BICON_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bicon/types.hpp"

// Minimal fully convolutional network: three 3x3 convolutions (1 -> 16 -> 16
// -> 16, mirror padding, tanh) and a 1x1 head with a logistic output.
namespace bicon {

enum class HeadVariant {
  Connectivity,  // 8-channel Conn map
  Saliency,      // 1-channel saliency map (baseline)
};

int head_channels(HeadVariant variant);

// Channel-major C x H x W activations.
struct Tensor3 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * static_cast<std::size_t>(h) *
                 static_cast<std::size_t>(w),
             fill) {}

  std::size_t plane() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  double* channel(int c) { return data.data() + static_cast<std::size_t>(c) * plane(); }
  const double* channel(int c) const {
    return data.data() + static_cast<std::size_t>(c) * plane();
  }
};

struct LayerSpec {
  int in_channels;
  int out_channels;
  int kernel;
  std::size_t weight_offset;
  std::size_t bias_offset;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(in_channels) * static_cast<std::size_t>(out_channels) *
           static_cast<std::size_t>(kernel * kernel);
  }
};

// Intermediate values kept by forward() for backward().
struct ForwardCache {
  std::vector<Tensor3> padded_inputs;  // mirror-padded input of each 3x3 layer
  std::vector<Tensor3> hidden;         // tanh output of each 3x3 layer
  Tensor3 output;                      // logistic output of the head
};

class ToyModel {
 public:
  static constexpr int kHiddenChannels = 16;
  static constexpr int kHiddenLayers = 3;

  // Uniform(-k, k) init with k = 1/sqrt(fan_in); the head starts at zero.
  ToyModel(HeadVariant variant, std::uint64_t seed);

  HeadVariant variant() const { return variant_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  Tensor3 forward(const Map& image, ForwardCache* cache = nullptr) const;

  // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  void backward(const ForwardCache& cache, const Tensor3& grad_output,
                std::span<double> grad) const;

 private:
  HeadVariant variant_;
  std::vector<LayerSpec> layers_;
  std::vector<double> params_;
};

// Connectivity head output rearranged to an H x W x 8 Conn map, and back.
ConnGrid to_conn_map(const Tensor3& output);
Tensor3 from_grid_gradient(const GridGradient& grad);

// Single-channel output as a Map, and back.
Map to_saliency_map(const Tensor3& output);
Tensor3 from_map_gradient(const Map& grad);

}  // namespace bicon

#endif  // BICON_MODEL_HPP
