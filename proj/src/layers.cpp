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

#include "layers.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace imfdiag {

void conv1d_forward(const Tensor& in, const ConvShape& shp,
                    std::span<const double> w, std::span<const double> b,
                    Activation act, Tensor& out) {
  if (in.channels != shp.in_ch)
    throw InvalidArgument("conv1d: channel mismatch");
  if (in.length < shp.width)
    throw InvalidArgument("conv1d: input shorter than kernel width");
  if (w.size() != shp.weight_count() ||
      b.size() != static_cast<std::size_t>(shp.out_ch))
    throw InvalidArgument("conv1d: weight/bias size mismatch");

  const int out_len = in.length - shp.width + 1;
  out.resize(shp.out_ch, out_len);
  for (int o = 0; o < shp.out_ch; ++o) {
    double* dst = out.row(o);
    for (int t = 0; t < out_len; ++t) dst[t] = b[static_cast<std::size_t>(o)];
    for (int i = 0; i < shp.in_ch; ++i) {
      const double* src = in.row(i);
      const double* ker =
          w.data() + (static_cast<std::size_t>(o) * shp.in_ch + i) * shp.width;
      for (int k = 0; k < shp.width; ++k) {
        const double wk = ker[k];
        const double* s = src + k;
        for (int t = 0; t < out_len; ++t) dst[t] += wk * s[t];
      }
    }
    if (act == Activation::relu) {
      for (int t = 0; t < out_len; ++t)
        if (dst[t] < 0.0) dst[t] = 0.0;
    }
  }
}

void conv1d_backward(const Tensor& in, const ConvShape& shp,
                     std::span<const double> w, Activation act,
                     const Tensor& out, const Tensor& grad_out,
                     Tensor& grad_in, std::span<double> grad_w,
                     std::span<double> grad_b) {
  const int out_len = out.length;
  grad_in.resize(shp.in_ch, in.length);

  // Gradient w.r.t. pre-activation; relu passes where the output is > 0.
  Tensor gpre = grad_out;
  if (act == Activation::relu) {
    for (std::size_t i = 0; i < gpre.data.size(); ++i)
      if (!(out.data[i] > 0.0)) gpre.data[i] = 0.0;
  }

  for (int o = 0; o < shp.out_ch; ++o) {
    const double* g = gpre.row(o);
    double gb = 0.0;
    for (int t = 0; t < out_len; ++t) gb += g[t];
    grad_b[static_cast<std::size_t>(o)] += gb;

    for (int i = 0; i < shp.in_ch; ++i) {
      const double* src = in.row(i);
      double* gin = grad_in.row(i);
      const std::size_t wbase =
          (static_cast<std::size_t>(o) * shp.in_ch + i) * shp.width;
      for (int k = 0; k < shp.width; ++k) {
        double gw = 0.0;
        const double* s = src + k;
        for (int t = 0; t < out_len; ++t) gw += g[t] * s[t];
        grad_w[wbase + static_cast<std::size_t>(k)] += gw;

        const double wk = w[wbase + static_cast<std::size_t>(k)];
        double* gi = gin + k;
        for (int t = 0; t < out_len; ++t) gi[t] += wk * g[t];
      }
    }
  }
}

void maxpool1d_forward(const Tensor& in, int width, Tensor& out,
                       std::vector<int>& argmax) {
  if (width < 1) throw InvalidArgument("maxpool1d: width must be >= 1");
  if (in.length < width)
    throw InvalidArgument("maxpool1d: input shorter than pool width");
  const int out_len = in.length / width;
  out.resize(in.channels, out_len);
  argmax.assign(static_cast<std::size_t>(in.channels) * out_len, 0);

  for (int c = 0; c < in.channels; ++c) {
    const double* src = in.row(c);
    double* dst = out.row(c);
    int* arg = argmax.data() + static_cast<std::size_t>(c) * out_len;
    for (int t = 0; t < out_len; ++t) {
      const int base = t * width;
      double best = src[base];
      int best_i = base;
      for (int k = 1; k < width; ++k) {
        if (src[base + k] > best) {  // strict: ties keep the first index
          best = src[base + k];
          best_i = base + k;
        }
      }
      dst[t] = best;
      arg[t] = best_i;
    }
  }
}

void maxpool1d_backward(const Tensor& in_shape_like, int width,
                        const std::vector<int>& argmax,
                        const Tensor& grad_out, Tensor& grad_in) {
  (void)width;
  grad_in.resize(in_shape_like.channels, in_shape_like.length);
  for (int c = 0; c < grad_out.channels; ++c) {
    const double* g = grad_out.row(c);
    const int* arg =
        argmax.data() + static_cast<std::size_t>(c) * grad_out.length;
    double* gi = grad_in.row(c);
    for (int t = 0; t < grad_out.length; ++t) gi[arg[t]] += g[t];
  }
}

void dropout_forward(const Tensor& in, double rate, Mode mode,
                     std::uint64_t mask_seed, Tensor& out,
                     std::vector<double>& mask) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InvalidArgument("dropout: rate must lie in [0,1)");
  out.resize(in.channels, in.length);
  mask.assign(in.data.size(), 1.0);
  if (mode == Mode::infer || rate == 0.0) {
    out.data = in.data;
    return;
  }
  const double scale = 1.0 / (1.0 - rate);
  SplitMix64 rng(mask_seed);
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    const double keep = rng.next_unit() >= rate ? scale : 0.0;
    mask[i] = keep;
    out.data[i] = in.data[i] * keep;
  }
}

void dropout_backward(const std::vector<double>& mask, const Tensor& grad_out,
                      Tensor& grad_in) {
  grad_in.resize(grad_out.channels, grad_out.length);
  for (std::size_t i = 0; i < mask.size(); ++i)
    grad_in.data[i] = grad_out.data[i] * mask[i];
}

void dense_forward(std::span<const double> in, int in_dim, int out_dim,
                   std::span<const double> w, std::span<const double> b,
                   Activation act, std::span<double> out) {
  if (in.size() != static_cast<std::size_t>(in_dim) ||
      out.size() != static_cast<std::size_t>(out_dim) ||
      w.size() != static_cast<std::size_t>(in_dim) * out_dim ||
      b.size() != static_cast<std::size_t>(out_dim))
    throw InvalidArgument("dense: shape mismatch");

  for (int o = 0; o < out_dim; ++o) {
    const double* row = w.data() + static_cast<std::size_t>(o) * in_dim;
    double acc = b[static_cast<std::size_t>(o)];
    for (int i = 0; i < in_dim; ++i) acc += row[i] * in[static_cast<std::size_t>(i)];
    if (act == Activation::relu && acc < 0.0) acc = 0.0;
    out[static_cast<std::size_t>(o)] = acc;
  }
}

void dense_backward(std::span<const double> in, int in_dim, int out_dim,
                    std::span<const double> w, Activation act,
                    std::span<const double> out,
                    std::span<const double> grad_out,
                    std::span<double> grad_in, std::span<double> grad_w,
                    std::span<double> grad_b) {
  if (grad_in.size() != static_cast<std::size_t>(in_dim) ||
      grad_out.size() != static_cast<std::size_t>(out_dim))
    throw InvalidArgument("dense backward: shape mismatch");

  std::fill(grad_in.begin(), grad_in.end(), 0.0);
  for (int o = 0; o < out_dim; ++o) {
    double g = grad_out[static_cast<std::size_t>(o)];
    if (act == Activation::relu && !(out[static_cast<std::size_t>(o)] > 0.0))
      g = 0.0;
    if (g == 0.0) continue;
    grad_b[static_cast<std::size_t>(o)] += g;
    const double* row = w.data() + static_cast<std::size_t>(o) * in_dim;
    double* gw = grad_w.data() + static_cast<std::size_t>(o) * in_dim;
    for (int i = 0; i < in_dim; ++i) {
      gw[i] += g * in[static_cast<std::size_t>(i)];
      grad_in[static_cast<std::size_t>(i)] += g * row[i];
    }
  }
}

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

SoftmaxXent softmax_xent(const std::array<double, 2>& logits, int label) {
  if (label != 0 && label != 1)
    throw InvalidArgument("softmax_xent: label must be 0 or 1");
  SoftmaxXent r;
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  r.probs = {e0 / z, e1 / z};
  // -ln p_label computed in log space to stay exact for extreme logits.
  r.loss = std::log(z) - (logits[static_cast<std::size_t>(label)] - m);
  r.grad_logits = r.probs;
  r.grad_logits[static_cast<std::size_t>(label)] -= 1.0;
  return r;
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size())
    throw InvalidArgument("adam_update: shape mismatch");

  state.t += 1;
  const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / b1t;
    const double vhat = state.v[i] / b2t;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps_stab);
  }
}

double grad_check(const std::function<double(std::span<const double>)>& loss_fn,
                  std::span<double> point,
                  std::span<const double> analytic_grad, double h) {
  if (point.size() != analytic_grad.size())
    throw InvalidArgument("grad_check: gradient size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = loss_fn(point);
    point[i] = saved - h;
    const double down = loss_fn(point);
    point[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double ga = analytic_grad[i];
    const double denom = std::max({std::fabs(ga), std::fabs(fd), 1e-12});
    worst = std::max(worst, std::fabs(ga - fd) / denom);
  }
  return worst;
}

}  // namespace imfdiag
