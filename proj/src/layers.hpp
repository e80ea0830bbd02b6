// Copyright 2026  imfdiag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IMFDIAG_LAYERS_HPP_
#define IMFDIAG_LAYERS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace imfdiag {

// Channels-by-length block, channel-major and contiguous.
struct Tensor {
  int channels = 1;
  int length = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int l)
      : channels(c), length(l),
        data(static_cast<std::size_t>(c) * static_cast<std::size_t>(l), 0.0) {}

  void resize(int c, int l) {
    channels = c;
    length = l;
    data.assign(static_cast<std::size_t>(c) * static_cast<std::size_t>(l),
                0.0);
  }
  double* row(int c) {
    return data.data() + static_cast<std::size_t>(c) * length;
  }
  const double* row(int c) const {
    return data.data() + static_cast<std::size_t>(c) * length;
  }
};

enum class Activation { none, relu };
enum class Mode { train, infer };

// ---------------------------------------------------------------------------
// 1D convolution (cross-correlation, valid padding, stride 1)
// ---------------------------------------------------------------------------

struct ConvShape {
  int in_ch = 1;
  int out_ch = 1;
  int width = 5;
  std::size_t weight_count() const {
    return static_cast<std::size_t>(in_ch) * out_ch * width;
  }
};

// out length = in.length - width + 1. Weights are [out][in][tap].
void conv1d_forward(const Tensor& in, const ConvShape& shp,
                    std::span<const double> w, std::span<const double> b,
                    Activation act, Tensor& out);

// grad_in is overwritten; grad_w/grad_b are accumulated into (+=) so a batch
// can reuse one buffer. `out` is the forward output (supplies the ReLU mask).
void conv1d_backward(const Tensor& in, const ConvShape& shp,
                     std::span<const double> w, Activation act,
                     const Tensor& out, const Tensor& grad_out,
                     Tensor& grad_in, std::span<double> grad_w,
                     std::span<double> grad_b);

// ---------------------------------------------------------------------------
// Max pooling (non-overlapping, odd trailing element dropped)
// ---------------------------------------------------------------------------

void maxpool1d_forward(const Tensor& in, int width, Tensor& out,
                       std::vector<int>& argmax);
void maxpool1d_backward(const Tensor& in_shape_like, int width,
                        const std::vector<int>& argmax,
                        const Tensor& grad_out, Tensor& grad_in);

// ---------------------------------------------------------------------------
// Inverted dropout
// ---------------------------------------------------------------------------

// Train mode scales surviving units by 1/(1-rate); infer mode is the
// identity. The mask holds the applied factor per element (0 or the scale)
// and is reproduced exactly from mask_seed.
void dropout_forward(const Tensor& in, double rate, Mode mode,
                     std::uint64_t mask_seed, Tensor& out,
                     std::vector<double>& mask);
void dropout_backward(const std::vector<double>& mask, const Tensor& grad_out,
                      Tensor& grad_in);

// ---------------------------------------------------------------------------
// Dense (fully connected)
// ---------------------------------------------------------------------------

// Weights are [out][in] row-major.
void dense_forward(std::span<const double> in, int in_dim, int out_dim,
                   std::span<const double> w, std::span<const double> b,
                   Activation act, std::span<double> out);
void dense_backward(std::span<const double> in, int in_dim, int out_dim,
                    std::span<const double> w, Activation act,
                    std::span<const double> out,
                    std::span<const double> grad_out,
                    std::span<double> grad_in, std::span<double> grad_w,
                    std::span<double> grad_b);

// ---------------------------------------------------------------------------
// Softmax + cross-entropy (binary head)
// ---------------------------------------------------------------------------

struct SoftmaxXent {
  std::array<double, 2> probs{};
  double loss = 0.0;
  std::array<double, 2> grad_logits{};
};

// Numerically stabilized by subtracting the max logit. loss = -ln p_label;
// grad = probs - onehot(label).
SoftmaxXent softmax_xent(const std::array<double, 2>& logits, int label);

std::array<double, 2> softmax2(const std::array<double, 2>& logits);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_stab = 1e-8;

  explicit AdamState(std::size_t n_params = 0, double learning_rate = 1e-5)
      : m(n_params, 0.0), v(n_params, 0.0), lr(learning_rate) {}
};

// Standard bias-corrected update, in place.
void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState& state);

// ---------------------------------------------------------------------------
// Finite-difference gradient verification
// ---------------------------------------------------------------------------

// Central differences on every element of `point`, compared against
// analytic_grad. Returns max |g_a - g_fd| / max(|g_a|, |g_fd|, 1e-12).
// `point` is perturbed in place and restored.
double grad_check(const std::function<double(std::span<const double>)>& loss_fn,
                  std::span<double> point, std::span<const double> analytic_grad,
                  double h);

}  // namespace imfdiag

#endif  // IMFDIAG_LAYERS_HPP_
