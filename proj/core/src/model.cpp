#include "bicon/model.hpp"

#include <algorithm>
#include <cmath>

#include "bicon/conn_codec.hpp"
#include "bicon/random.hpp"

namespace bicon {

namespace {

constexpr int kLanes = 4;

// Replicate the border by one pixel on every side.
Tensor3 mirror_pad(const Tensor3& in) {
  const int h = in.height;
  const int w = in.width;
  Tensor3 out(in.channels, h + 2, w + 2);
  for (int c = 0; c < in.channels; ++c) {
    const double* src = in.channel(c);
    double* dst = out.channel(c);
    for (int py = 0; py < h + 2; ++py) {
      const int y = mirror_coordinate(py - 1, h);
      double* row = dst + static_cast<std::size_t>(py) * (w + 2);
      const double* src_row = src + static_cast<std::size_t>(y) * w;
      row[0] = src_row[0];
      std::copy(src_row, src_row + w, row + 1);
      row[w + 1] = src_row[w - 1];
    }
  }
  return out;
}

// Adjoint of mirror_pad: padded-gradient entries accumulate into their source.
Tensor3 mirror_fold(const Tensor3& padded, int h, int w) {
  Tensor3 out(padded.channels, h, w);
  for (int c = 0; c < padded.channels; ++c) {
    const double* src = padded.channel(c);
    double* dst = out.channel(c);
    for (int py = 0; py < h + 2; ++py) {
      const int y = mirror_coordinate(py - 1, h);
      const double* row = src + static_cast<std::size_t>(py) * (w + 2);
      double* dst_row = dst + static_cast<std::size_t>(y) * w;
      dst_row[0] += row[0];
      for (int x = 0; x < w; ++x) dst_row[x] += row[x + 1];
      dst_row[w - 1] += row[w + 1];
    }
  }
  return out;
}

Tensor3 conv3x3(const Tensor3& padded, const LayerSpec& layer, std::span<const double> params) {
  const int h = padded.height - 2;
  const int w = padded.width - 2;
  const int pw = padded.width;
  Tensor3 out(layer.out_channels, h, w);
  const double* weights = params.data() + layer.weight_offset;
  const double* bias = params.data() + layer.bias_offset;
  for (int o = 0; o < layer.out_channels; ++o) {
    double* dst = out.channel(o);
    std::fill(dst, dst + out.plane(), bias[o]);
    for (int i = 0; i < layer.in_channels; ++i) {
      const double* src = padded.channel(i);
      const double* k = weights + (static_cast<std::size_t>(o) * layer.in_channels + i) * 9;
      for (int y = 0; y < h; ++y) {
        double* out_row = dst + static_cast<std::size_t>(y) * w;
        const double* r0 = src + static_cast<std::size_t>(y) * pw;
        const double* r1 = r0 + pw;
        const double* r2 = r1 + pw;
        for (int x = 0; x < w; ++x) {
          out_row[x] += (k[0] * r0[x] + k[1] * r0[x + 1] + k[2] * r0[x + 2]) +
                        (k[3] * r1[x] + k[4] * r1[x + 1] + k[5] * r1[x + 2]) +
                        (k[6] * r2[x] + k[7] * r2[x + 1] + k[8] * r2[x + 2]);
        }
      }
    }
  }
  return out;
}

// Returns d/d(padded input) when want_input is set; always accumulates the
// parameter gradient.
Tensor3 conv3x3_backward(const Tensor3& padded, const Tensor3& grad_out, const LayerSpec& layer,
                         std::span<const double> params, std::span<double> grad,
                         bool want_input) {
  const int h = grad_out.height;
  const int w = grad_out.width;
  const int pw = padded.width;
  const double* weights = params.data() + layer.weight_offset;
  double* gw = grad.data() + layer.weight_offset;
  double* gb = grad.data() + layer.bias_offset;
  const int ph = padded.height;
  Tensor3 grad_in;
  if (want_input) grad_in = Tensor3(padded.channels, ph, pw);

  // grad_out with a two-pixel zero border, so every padded input pixel sees
  // all nine taps.
  const int gw2 = w + 4;
  std::vector<double> gpad(static_cast<std::size_t>(h + 4) * gw2, 0.0);

  for (int o = 0; o < layer.out_channels; ++o) {
    const double* g = grad_out.channel(o);
    double bias_sum = 0.0;
    for (std::size_t p = 0; p < grad_out.plane(); ++p) bias_sum += g[p];
    gb[o] += bias_sum;
    if (want_input) {
      for (int y = 0; y < h; ++y) {
        std::copy(g + static_cast<std::size_t>(y) * w, g + static_cast<std::size_t>(y + 1) * w,
                  gpad.begin() + static_cast<std::ptrdiff_t>((y + 2) * gw2 + 2));
      }
    }
    for (int i = 0; i < layer.in_channels; ++i) {
      const double* src = padded.channel(i);
      const std::size_t kbase = (static_cast<std::size_t>(o) * layer.in_channels + i) * 9;
      const double* k = weights + kbase;
      double* gk = gw + kbase;
      // Interleaved partial sums per tap.
      double acc[9][kLanes] = {};
      for (int y = 0; y < h; ++y) {
        const double* g_row = g + static_cast<std::size_t>(y) * w;
        const double* r0 = src + static_cast<std::size_t>(y) * pw;
        const double* r1 = r0 + pw;
        const double* r2 = r1 + pw;
        int x = 0;
        for (; x + kLanes <= w; x += kLanes) {
          for (int l = 0; l < kLanes; ++l) {
            const double gv = g_row[x + l];
            acc[0][l] += gv * r0[x + l];
            acc[1][l] += gv * r0[x + l + 1];
            acc[2][l] += gv * r0[x + l + 2];
            acc[3][l] += gv * r1[x + l];
            acc[4][l] += gv * r1[x + l + 1];
            acc[5][l] += gv * r1[x + l + 2];
            acc[6][l] += gv * r2[x + l];
            acc[7][l] += gv * r2[x + l + 1];
            acc[8][l] += gv * r2[x + l + 2];
          }
        }
        for (; x < w; ++x) {
          const double gv = g_row[x];
          acc[0][0] += gv * r0[x];
          acc[1][0] += gv * r0[x + 1];
          acc[2][0] += gv * r0[x + 2];
          acc[3][0] += gv * r1[x];
          acc[4][0] += gv * r1[x + 1];
          acc[5][0] += gv * r1[x + 2];
          acc[6][0] += gv * r2[x];
          acc[7][0] += gv * r2[x + 1];
          acc[8][0] += gv * r2[x + 2];
        }
      }
      for (int t = 0; t < 9; ++t) {
        for (int l = 0; l < kLanes; ++l) gk[t] += acc[t][l];
      }

      if (!want_input) continue;
      // Padded pixel (py, p) receives sum over taps of k[ky][kx] g[py - ky][p - kx].
      double* gin = grad_in.channel(i);
      for (int py = 0; py < ph; ++py) {
        double* gin_row = gin + static_cast<std::size_t>(py) * pw;
        const double* g0 = gpad.data() + static_cast<std::size_t>(py + 2) * gw2 + 2;
        const double* g1 = g0 - gw2;
        const double* g2 = g1 - gw2;
        for (int p = 0; p < pw; ++p) {
          gin_row[p] += (k[0] * g0[p] + k[1] * g0[p - 1] + k[2] * g0[p - 2]) +
                        (k[3] * g1[p] + k[4] * g1[p - 1] + k[5] * g1[p - 2]) +
                        (k[6] * g2[p] + k[7] * g2[p - 1] + k[8] * g2[p - 2]);
        }
      }
    }
  }
  return grad_in;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

int head_channels(HeadVariant variant) {
  return variant == HeadVariant::Connectivity ? kChannels : 1;
}

ToyModel::ToyModel(HeadVariant variant, std::uint64_t seed) : variant_(variant) {
  std::size_t offset = 0;
  auto add_layer = [&](int in, int out, int kernel) {
    LayerSpec spec{in, out, kernel, offset, 0};
    offset += spec.weight_count();
    spec.bias_offset = offset;
    offset += static_cast<std::size_t>(out);
    layers_.push_back(spec);
  };
  add_layer(1, kHiddenChannels, 3);
  for (int l = 1; l < kHiddenLayers; ++l) add_layer(kHiddenChannels, kHiddenChannels, 3);
  add_layer(kHiddenChannels, head_channels(variant), 1);
  params_.assign(offset, 0.0);

  // The hidden-layer draws do not depend on the head, so both variants share
  // identical hidden weights for the same seed.
  Rng rng(seed, 0x6d6f64656cULL);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const LayerSpec& spec = layers_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.in_channels * spec.kernel *
                                                               spec.kernel));
    for (std::size_t i = spec.weight_offset; i < spec.bias_offset + spec.out_channels; ++i) {
      params_[i] = rng.uniform(-bound, bound);
    }
  }
}

Tensor3 ToyModel::forward(const Map& image, ForwardCache* cache) const {
  if (image.shape().empty()) throw InvalidArgument("forward: empty image");
  Tensor3 act(1, image.height(), image.width());
  std::copy(image.values().begin(), image.values().end(), act.data.begin());
  if (cache != nullptr) {
    cache->padded_inputs.clear();
    cache->hidden.clear();
  }

  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Tensor3 padded = mirror_pad(act);
    act = conv3x3(padded, layers_[l], params_);
    for (double& v : act.data) v = std::tanh(v);
    if (cache != nullptr) {
      cache->padded_inputs.push_back(std::move(padded));
      cache->hidden.push_back(act);
    }
  }

  const LayerSpec& head = layers_.back();
  Tensor3 out(head.out_channels, act.height, act.width);
  const double* weights = params_.data() + head.weight_offset;
  const double* bias = params_.data() + head.bias_offset;
  for (int o = 0; o < head.out_channels; ++o) {
    double* dst = out.channel(o);
    std::fill(dst, dst + out.plane(), bias[o]);
    for (int i = 0; i < head.in_channels; ++i) {
      const double wv = weights[static_cast<std::size_t>(o) * head.in_channels + i];
      const double* src = act.channel(i);
      for (std::size_t p = 0; p < out.plane(); ++p) dst[p] += wv * src[p];
    }
    for (std::size_t p = 0; p < out.plane(); ++p) dst[p] = logistic(dst[p]);
  }
  if (cache != nullptr) cache->output = out;
  return out;
}

void ToyModel::backward(const ForwardCache& cache, const Tensor3& grad_output,
                        std::span<double> grad) const {
  if (grad.size() != params_.size()) throw InvalidArgument("backward: gradient size mismatch");
  const LayerSpec& head = layers_.back();
  const Tensor3& out = cache.output;
  if (grad_output.channels != out.channels || grad_output.plane() != out.plane()) {
    throw InvalidArgument("backward: output gradient shape mismatch");
  }
  const Tensor3& last = cache.hidden.back();

  // Through the logistic.
  Tensor3 pre(out.channels, out.height, out.width);
  for (std::size_t i = 0; i < pre.data.size(); ++i) {
    pre.data[i] = grad_output.data[i] * out.data[i] * (1.0 - out.data[i]);
  }

  // 1x1 head.
  Tensor3 grad_act(head.in_channels, out.height, out.width);
  const double* weights = params_.data() + head.weight_offset;
  for (int o = 0; o < head.out_channels; ++o) {
    const double* g = pre.channel(o);
    double bias_sum = 0.0;
    for (std::size_t p = 0; p < pre.plane(); ++p) bias_sum += g[p];
    grad[head.bias_offset + static_cast<std::size_t>(o)] += bias_sum;
    for (int i = 0; i < head.in_channels; ++i) {
      const std::size_t widx = static_cast<std::size_t>(o) * head.in_channels + i;
      const double* a = last.channel(i);
      double* ga = grad_act.channel(i);
      double acc = 0.0;
      for (std::size_t p = 0; p < pre.plane(); ++p) {
        acc += g[p] * a[p];
        ga[p] += weights[widx] * g[p];
      }
      grad[head.weight_offset + widx] += acc;
    }
  }

  for (std::size_t l = layers_.size() - 1; l-- > 0;) {
    const Tensor3& a = cache.hidden[l];
    for (std::size_t i = 0; i < grad_act.data.size(); ++i) {
      grad_act.data[i] *= 1.0 - a.data[i] * a.data[i];
    }
    Tensor3 grad_padded =
        conv3x3_backward(cache.padded_inputs[l], grad_act, layers_[l], params_, grad, l > 0);
    if (l > 0) grad_act = mirror_fold(grad_padded, a.height, a.width);
  }
}

ConnGrid to_conn_map(const Tensor3& output) {
  if (output.channels != kChannels) throw InvalidArgument("to_conn_map: expected 8 channels");
  ConnGrid grid(output.height, output.width, GridKind::ConnMap);
  for (int c = 0; c < kChannels; ++c) {
    const double* src = output.channel(c);
    for (int y = 0; y < output.height; ++y) {
      for (int x = 0; x < output.width; ++x) {
        grid(y, x, c) = src[static_cast<std::size_t>(y) * output.width + x];
      }
    }
  }
  return grid;
}

Tensor3 from_grid_gradient(const GridGradient& grad) {
  Tensor3 out(kChannels, grad.height(), grad.width());
  for (int c = 0; c < kChannels; ++c) {
    double* dst = out.channel(c);
    for (int y = 0; y < grad.height(); ++y) {
      for (int x = 0; x < grad.width(); ++x) {
        dst[static_cast<std::size_t>(y) * grad.width() + x] = grad(y, x, c);
      }
    }
  }
  return out;
}

Map to_saliency_map(const Tensor3& output) {
  if (output.channels != 1) throw InvalidArgument("to_saliency_map: expected 1 channel");
  Map map(output.height, output.width);
  std::copy(output.data.begin(), output.data.end(), map.values().begin());
  return map;
}

Tensor3 from_map_gradient(const Map& grad) {
  Tensor3 out(1, grad.height(), grad.width());
  std::copy(grad.values().begin(), grad.values().end(), out.data.begin());
  return out;
}

}  // namespace bicon
