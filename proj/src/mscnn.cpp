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

#include "mscnn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "errors.hpp"
#include "rng.hpp"

namespace imfdiag {

namespace {

void validate_spec(const ModelSpec& spec) {
  if (spec.k_branches < 1)
    throw InvalidArgument("model spec: k_branches must be >= 1");
  if (spec.input_len < 24)
    throw InvalidArgument("model spec: input_len must be >= 24");
  if (spec.classes != 2)
    throw InvalidArgument("model spec: binary head expected");
}

// Dropout mask streams per network site, derived from the per-call seed.
std::uint64_t mask_seed(std::uint64_t seed, int branch, int site) {
  return derive_stream(seed, static_cast<std::uint64_t>(branch) * 4 +
                                 static_cast<std::uint64_t>(site) + 1);
}

}  // namespace

int branch_flatten_len(const ModelSpec& spec) {
  validate_spec(spec);
  const int l1 = spec.input_len - spec.conv1_width + 1;
  const int p1 = l1 / spec.pool_width;
  const int l2 = p1 - spec.conv2_width + 1;
  const int p2 = l2 / spec.pool_width;
  if (p2 < 1) throw InvalidArgument("model spec: input too short for stack");
  return spec.conv2_filters * p2;
}

std::span<double> ModelParams::segment(std::size_t entry) {
  const ParamEntry& e = layout[entry];
  return {values.data() + e.offset, e.size};
}

std::span<const double> ModelParams::segment(std::size_t entry) const {
  const ParamEntry& e = layout[entry];
  return {values.data() + e.offset, e.size};
}

ModelParams build(const ModelSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  const int flat = branch_flatten_len(spec);

  ModelParams p;
  p.spec = spec;
  std::size_t offset = 0;
  auto add = [&](const std::string& name, std::vector<std::uint64_t> dims) {
    std::size_t size = 1;
    for (std::uint64_t d : dims) size *= d;
    p.layout.push_back({name, std::move(dims), offset, size});
    offset += size;
  };

  for (int b = 0; b < spec.k_branches; ++b) {
    const std::string prefix = "branch" + std::to_string(b);
    add(prefix + ".conv1.w",
        {static_cast<std::uint64_t>(spec.conv1_filters), 1,
         static_cast<std::uint64_t>(spec.conv1_width)});
    add(prefix + ".conv1.b", {static_cast<std::uint64_t>(spec.conv1_filters)});
    add(prefix + ".conv2.w",
        {static_cast<std::uint64_t>(spec.conv2_filters),
         static_cast<std::uint64_t>(spec.conv1_filters),
         static_cast<std::uint64_t>(spec.conv2_width)});
    add(prefix + ".conv2.b", {static_cast<std::uint64_t>(spec.conv2_filters)});
  }
  add("head.fc1.w",
      {static_cast<std::uint64_t>(spec.hidden),
       static_cast<std::uint64_t>(spec.k_branches) *
           static_cast<std::uint64_t>(flat)});
  add("head.fc1.b", {static_cast<std::uint64_t>(spec.hidden)});
  add("head.fc2.w", {static_cast<std::uint64_t>(spec.classes),
                     static_cast<std::uint64_t>(spec.hidden)});
  add("head.fc2.b", {static_cast<std::uint64_t>(spec.classes)});

  p.values.assign(offset, 0.0);

  // Kaiming-normal weights (fan-in scaling), zero biases.
  for (std::size_t e = 0; e < p.layout.size(); ++e) {
    const ParamEntry& entry = p.layout[e];
    if (entry.name.ends_with(".b")) continue;
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < entry.dims.size(); ++d)
      fan_in *= entry.dims[d];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    const std::vector<double> noise =
        gaussian_noise(entry.size, stddev, derive_stream(seed, e));
    std::copy(noise.begin(), noise.end(), p.values.begin() + entry.offset);
  }
  return p;
}

void standardize_rows(const IMFSet& sample, const ModelSpec& spec,
                      std::vector<BranchCache>& branches) {
  if (sample.k() != spec.k_branches)
    throw InvalidArgument("forward: sample has wrong IMF count");
  if (sample.source_length() != static_cast<std::size_t>(spec.input_len))
    throw InvalidArgument("forward: sample has wrong window length");
  branches.resize(static_cast<std::size_t>(spec.k_branches));
  for (int b = 0; b < spec.k_branches; ++b) {
    const std::vector<double>& row = sample.imfs[static_cast<std::size_t>(b)];
    Tensor& dst = branches[static_cast<std::size_t>(b)].in_std;
    dst.resize(1, spec.input_len);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    const double stddev =
        std::max(std::sqrt(var / static_cast<double>(row.size())), 1e-12);
    for (std::size_t i = 0; i < row.size(); ++i)
      dst.data[i] = (row[i] - mean) / stddev;
  }
}

std::array<double, 2> forward_network(const ModelParams& params, Mode mode,
                                      std::uint64_t seed, ForwardCache& cache) {
  const ModelSpec& spec = params.spec;
  const int flat = branch_flatten_len(spec);
  const int concat_len = spec.k_branches * flat;
  cache.concat.resize(static_cast<std::size_t>(concat_len));

  for (int b = 0; b < spec.k_branches; ++b) {
    BranchCache& br = cache.branches[static_cast<std::size_t>(b)];
    const std::size_t e0 = static_cast<std::size_t>(b) * 4;
    const ConvShape c1{1, spec.conv1_filters, spec.conv1_width};
    const ConvShape c2{spec.conv1_filters, spec.conv2_filters,
                       spec.conv2_width};

    conv1d_forward(br.in_std, c1, params.segment(e0), params.segment(e0 + 1),
                   Activation::relu, br.c1);
    maxpool1d_forward(br.c1, spec.pool_width, br.p1, br.p1_arg);
    dropout_forward(br.p1, spec.drop_branch, mode, mask_seed(seed, b, 0),
                    br.d1, br.m1);
    conv1d_forward(br.d1, c2, params.segment(e0 + 2), params.segment(e0 + 3),
                   Activation::relu, br.c2);
    maxpool1d_forward(br.c2, spec.pool_width, br.p2, br.p2_arg);
    dropout_forward(br.p2, spec.drop_branch, mode, mask_seed(seed, b, 1),
                    br.d2, br.m2);

    std::copy(br.d2.data.begin(), br.d2.data.end(),
              cache.concat.begin() + static_cast<std::ptrdiff_t>(b) * flat);
  }

  const std::size_t fc1_w = params.layout.size() - 4;
  cache.fc1.resize(static_cast<std::size_t>(spec.hidden));
  dense_forward(cache.concat, concat_len, spec.hidden, params.segment(fc1_w),
                params.segment(fc1_w + 1), Activation::relu, cache.fc1);

  cache.fc1_t.resize(1, spec.hidden);
  std::copy(cache.fc1.begin(), cache.fc1.end(), cache.fc1_t.data.begin());
  dropout_forward(cache.fc1_t, spec.drop_head, mode,
                  mask_seed(seed, spec.k_branches, 2), cache.fc1_drop,
                  cache.head_mask);

  std::array<double, 2> logits{};
  dense_forward(cache.fc1_drop.data, spec.hidden, spec.classes,
                params.segment(fc1_w + 2), params.segment(fc1_w + 3),
                Activation::none, logits);
  cache.logits = logits;
  return softmax2(logits);
}

std::array<double, 2> forward(const ModelParams& params, const IMFSet& sample,
                              Mode mode, std::uint64_t seed,
                              ForwardCache& cache) {
  standardize_rows(sample, params.spec, cache.branches);
  return forward_network(params, mode, seed, cache);
}

void backward(const ModelParams& params, const ForwardCache& cache,
              const std::array<double, 2>& grad_logits,
              std::span<double> grad_params, std::vector<Tensor>* grad_inputs) {
  const ModelSpec& spec = params.spec;
  const int flat = branch_flatten_len(spec);
  const int concat_len = spec.k_branches * flat;
  const std::size_t fc1_w = params.layout.size() - 4;
  auto gseg = [&](std::size_t e) {
    const ParamEntry& entry = params.layout[e];
    return grad_params.subspan(entry.offset, entry.size);
  };

  // Head.
  std::vector<double> grad_fc1_drop(static_cast<std::size_t>(spec.hidden));
  dense_backward(cache.fc1_drop.data, spec.hidden, spec.classes,
                 params.segment(fc1_w + 2), Activation::none,
                 std::span<const double>(&cache.logits[0], 2),
                 std::span<const double>(grad_logits.data(), 2), grad_fc1_drop,
                 gseg(fc1_w + 2), gseg(fc1_w + 3));

  Tensor grad_fc1_t;
  {
    Tensor g_drop(1, spec.hidden);
    g_drop.data = grad_fc1_drop;
    dropout_backward(cache.head_mask, g_drop, grad_fc1_t);
  }

  std::vector<double> grad_concat(static_cast<std::size_t>(concat_len));
  dense_backward(cache.concat, concat_len, spec.hidden, params.segment(fc1_w),
                 Activation::relu, cache.fc1, grad_fc1_t.data, grad_concat,
                 gseg(fc1_w), gseg(fc1_w + 1));

  // Branches.
  if (grad_inputs)
    grad_inputs->assign(static_cast<std::size_t>(spec.k_branches), Tensor{});
  Tensor grad_d2, grad_p2, grad_c2, grad_d1, grad_p1, grad_c1, grad_in;
  for (int b = 0; b < spec.k_branches; ++b) {
    const BranchCache& br = cache.branches[static_cast<std::size_t>(b)];
    const std::size_t e0 = static_cast<std::size_t>(b) * 4;
    const ConvShape c1{1, spec.conv1_filters, spec.conv1_width};
    const ConvShape c2{spec.conv1_filters, spec.conv2_filters,
                       spec.conv2_width};

    grad_d2.resize(br.d2.channels, br.d2.length);
    std::copy(grad_concat.begin() + static_cast<std::ptrdiff_t>(b) * flat,
              grad_concat.begin() + static_cast<std::ptrdiff_t>(b + 1) * flat,
              grad_d2.data.begin());

    dropout_backward(br.m2, grad_d2, grad_p2);
    maxpool1d_backward(br.c2, spec.pool_width, br.p2_arg, grad_p2, grad_c2);
    conv1d_backward(br.d1, c2, params.segment(e0 + 2), Activation::relu,
                    br.c2, grad_c2, grad_d1, gseg(e0 + 2), gseg(e0 + 3));
    dropout_backward(br.m1, grad_d1, grad_p1);
    maxpool1d_backward(br.c1, spec.pool_width, br.p1_arg, grad_p1, grad_c1);
    conv1d_backward(br.in_std, c1, params.segment(e0), Activation::relu,
                    br.c1, grad_c1, grad_in, gseg(e0), gseg(e0 + 1));
    if (grad_inputs) (*grad_inputs)[static_cast<std::size_t>(b)] = grad_in;
  }
}

bool EarlyStopping::observe(int epoch, double val_loss) {
  if (best_loss_ - val_loss > min_delta_) {
    best_loss_ = val_loss;
    best_epoch_ = epoch;
    stale_ = 0;
    improved_last_ = true;
  } else {
    ++stale_;
    improved_last_ = false;
  }
  return stale_ >= patience_;
}

namespace {

void validate_fit_dataset(const WindowedDataset& ds, const ModelSpec& spec,
                          const char* which) {
  if (!ds.decomposed || ds.size() == 0)
    throw InvalidArgument(std::string("fit: ") + which +
                          " dataset must be decomposed and non-empty");
  for (const IMFSet& s : ds.imfsets) {
    if (s.k() != spec.k_branches ||
        s.source_length() != static_cast<std::size_t>(spec.input_len))
      throw InvalidArgument(std::string("fit: ") + which +
                            " sample shape disagrees with model spec");
  }
}

}  // namespace

FitResult fit(const WindowedDataset& train, const WindowedDataset& val,
              const ModelSpec& spec, const TrainConfig& cfg) {
  validate_fit_dataset(train, spec, "train");
  validate_fit_dataset(val, spec, "val");
  if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1)
    throw InvalidArgument("fit: batch_size, max_epochs, patience must be >= 1");
  if (cfg.patience > cfg.max_epochs)
    throw InvalidArgument("fit: patience must not exceed max_epochs");
  if (!(cfg.lr > 0.0)) throw InvalidArgument("fit: lr must be positive");

  ModelParams params = build(spec, derive_stream(cfg.seed, 0x1417));
  AdamState adam(params.values.size(), cfg.lr);
  std::vector<double> grads(params.values.size(), 0.0);
  ForwardCache cache;

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  EarlyStopping stopper(cfg.patience);
  TrainHistory history;
  std::vector<double> best_values;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    SplitMix64 shuffle_rng(
        derive_stream(cfg.seed, 0x5E0F, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = shuffle_rng.next_below(i + 1);
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t bn =
          std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
      std::fill(grads.begin(), grads.end(), 0.0);
      for (std::size_t j = 0; j < bn; ++j) {
        const std::size_t idx = order[start + j];
        const std::uint64_t sample_seed = derive_stream(
            cfg.seed, static_cast<std::uint64_t>(epoch), start + j);
        forward(params, train.imfsets[idx], Mode::train, sample_seed, cache);
        const SoftmaxXent sx =
            softmax_xent(cache.logits, train.labels[idx]);
        epoch_loss += sx.loss;
        backward(params, cache, sx.grad_logits, grads);
      }
      // Averaged batch gradients keep the step size batch-size independent.
      const double inv = 1.0 / static_cast<double>(bn);
      for (double& g : grads) g *= inv;
      adam_update(params.values, grads, adam);
    }
    const double train_loss = epoch_loss / static_cast<double>(n);

    double val_loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      const std::array<double, 2> probs =
          forward(params, val.imfsets[i], Mode::infer, 0, cache);
      val_loss += softmax_xent(cache.logits, val.labels[i]).loss;
      const int pred = probs[1] > probs[0] ? 1 : 0;
      if (pred == val.labels[i]) ++correct;
    }
    val_loss /= static_cast<double>(val.size());
    const double val_acc =
        static_cast<double>(correct) / static_cast<double>(val.size());

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw NumericError("fit: loss went non-finite at epoch " +
                         std::to_string(epoch));

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    history.epochs.push_back({epoch, train_loss, val_loss, val_acc, seconds});

    const bool stop = stopper.observe(epoch, val_loss);
    if (stopper.improved_last()) best_values = params.values;
    if (stop) {
      history.stopped_early = true;
      break;
    }
  }

  history.best_epoch = stopper.best_epoch();
  params.values = std::move(best_values);
  return {std::move(params), std::move(history)};
}

PredictResult predict(const ModelParams& params, const WindowedDataset& ds) {
  if (!ds.decomposed || ds.size() == 0)
    throw InvalidArgument("predict: dataset must be decomposed and non-empty");

  PredictResult out;
  out.labels.reserve(ds.size());
  out.probs.reserve(ds.size());
  ForwardCache cache;

  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::array<double, 2> probs =
        forward(params, ds.imfsets[i], Mode::infer, 0, cache);
    out.probs.push_back(probs);
    out.labels.push_back(probs[1] > probs[0] ? 1 : 0);
  }
  const double total_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0)
          .count();
  out.ms_per_sample = total_ms / static_cast<double>(ds.size());
  return out;
}

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'S', 'C', '1'};

template <typename T>
void put(std::FILE* f, const T& v) {
  std::fwrite(&v, sizeof(T), 1, f);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError(path + ": truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);

  std::fwrite(kCheckpointMagic, 1, 4, f);
  put<std::uint32_t>(f, 1);  // version
  const ModelSpec& s = params.spec;
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.k_branches));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.input_len));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.conv1_filters));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.conv1_width));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.conv2_filters));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.conv2_width));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.pool_width));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.hidden));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(s.classes));
  put<double>(f, s.drop_branch);
  put<double>(f, s.drop_head);

  put<std::uint32_t>(f, static_cast<std::uint32_t>(params.layout.size()));
  for (const ParamEntry& e : params.layout) {
    put<std::uint16_t>(f, static_cast<std::uint16_t>(e.name.size()));
    std::fwrite(e.name.data(), 1, e.name.size(), f);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(e.dims.size()));
    for (std::uint64_t d : e.dims) put<std::uint64_t>(f, d);
  }
  std::fwrite(params.values.data(), sizeof(double), params.values.size(), f);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw DataError(path + ": not a checkpoint file");
  const auto version = get<std::uint32_t>(in, path);
  if (version != 1)
    throw DataError(path + ": unsupported checkpoint version " +
                    std::to_string(version));

  ModelParams p;
  p.spec.k_branches = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.input_len = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.conv1_filters = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.conv1_width = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.conv2_filters = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.conv2_width = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.pool_width = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.hidden = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.classes = static_cast<int>(get<std::uint32_t>(in, path));
  p.spec.drop_branch = get<double>(in, path);
  p.spec.drop_head = get<double>(in, path);

  const auto n_entries = get<std::uint32_t>(in, path);
  std::size_t offset = 0;
  for (std::uint32_t e = 0; e < n_entries; ++e) {
    ParamEntry entry;
    const auto name_len = get<std::uint16_t>(in, path);
    entry.name.resize(name_len);
    in.read(entry.name.data(), name_len);
    const auto ndims = get<std::uint32_t>(in, path);
    std::size_t size = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
      entry.dims.push_back(get<std::uint64_t>(in, path));
      size *= entry.dims.back();
    }
    entry.offset = offset;
    entry.size = size;
    offset += size;
    p.layout.push_back(std::move(entry));
  }
  p.values.resize(offset);
  in.read(reinterpret_cast<char*>(p.values.data()),
          static_cast<std::streamsize>(offset * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != offset * sizeof(double))
    throw DataError(path + ": truncated checkpoint values");
  return p;
}

}  // namespace imfdiag
