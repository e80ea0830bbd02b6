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

#ifndef IMFDIAG_MSCNN_HPP_
#define IMFDIAG_MSCNN_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "layers.hpp"

namespace imfdiag {

// One branch per IMF: conv(8,w5)+relu -> pool(2) -> drop(0.6) ->
// conv(16,w5)+relu -> pool(2) -> drop(0.6) -> flatten. Branch features are
// concatenated into a shared head: dense(32)+relu -> drop(0.7) -> dense(2)
// -> softmax. Branches share the architecture but never the weights.
struct ModelSpec {
  int k_branches = 10;
  int input_len = 0;
  int conv1_filters = 8;
  int conv1_width = 5;
  int conv2_filters = 16;
  int conv2_width = 5;
  int pool_width = 2;
  double drop_branch = 0.6;
  int hidden = 32;
  double drop_head = 0.7;
  int classes = 2;
};

// Flattened feature length of one branch; input_len must be >= 24 so both
// convolution/pool pairs fit.
int branch_flatten_len(const ModelSpec& spec);

struct ParamEntry {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct ModelParams {
  ModelSpec spec;
  std::vector<ParamEntry> layout;
  std::vector<double> values;  // all weights/biases, flat, in layout order

  std::span<double> segment(std::size_t entry);
  std::span<const double> segment(std::size_t entry) const;
};

// Allocates and seeds all parameters (Kaiming-normal weights, zero biases).
ModelParams build(const ModelSpec& spec, std::uint64_t seed);

struct BranchCache {
  Tensor in_std;  // standardized IMF row, 1 x L
  Tensor c1, p1, d1, c2, p2, d2;
  std::vector<int> p1_arg, p2_arg;
  std::vector<double> m1, m2;  // dropout masks
};

struct ForwardCache {
  std::vector<BranchCache> branches;
  std::vector<double> concat;
  std::vector<double> fc1;
  Tensor fc1_t, fc1_drop;          // head dropout operates on a 1 x hidden block
  std::vector<double> head_mask;
  std::array<double, 2> logits{};
};

// Zero mean, unit variance per IMF row (std floored at 1e-12).
void standardize_rows(const IMFSet& sample, const ModelSpec& spec,
                      std::vector<BranchCache>& branches);

// Full forward pass; the residual row of the IMFSet is never consumed.
// Dropout masks derive from `seed`, so train-mode passes are reproducible.
std::array<double, 2> forward(const ModelParams& params, const IMFSet& sample,
                              Mode mode, std::uint64_t seed,
                              ForwardCache& cache);

// Network-only forward: cache.branches[b].in_std must already be populated.
// Lets verification drive the differentiable part directly.
std::array<double, 2> forward_network(const ModelParams& params, Mode mode,
                                      std::uint64_t seed, ForwardCache& cache);

// Accumulates parameter gradients (+=) into grad_params (same layout as
// values). When grad_inputs is non-null it receives d loss / d in_std per
// branch.
void backward(const ModelParams& params, const ForwardCache& cache,
              const std::array<double, 2>& grad_logits,
              std::span<double> grad_params,
              std::vector<Tensor>* grad_inputs = nullptr);

struct TrainConfig {
  double lr = 1e-5;
  int batch_size = 16;
  int max_epochs = 100;
  int patience = 15;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
};

// Validation-loss patience rule: an epoch improves when it beats the best
// loss by more than min_delta; training stops after `patience` consecutive
// non-improving epochs.
class EarlyStopping {
 public:
  EarlyStopping(int patience, double min_delta = 1e-6)
      : patience_(patience), min_delta_(min_delta) {}

  // Returns true when training should stop after this epoch.
  bool observe(int epoch, double val_loss);

  bool improved_last() const { return improved_last_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  int patience_;
  double min_delta_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int stale_ = 0;
  bool improved_last_ = false;
};

struct FitResult {
  ModelParams params;  // weights from the best-validation-loss epoch
  TrainHistory history;
};

// Seeded minibatch Adam training with early stopping. Both datasets must be
// decomposed and match the spec's shape. Throws NumericError when a loss
// goes non-finite.
FitResult fit(const WindowedDataset& train, const WindowedDataset& val,
              const ModelSpec& spec, const TrainConfig& cfg);

struct PredictResult {
  std::vector<int> labels;
  std::vector<std::array<double, 2>> probs;
  double ms_per_sample = 0.0;
};

// Infer-mode argmax; exact probability ties resolve to label 0.
PredictResult predict(const ModelParams& params, const WindowedDataset& ds);

// Versioned binary checkpoint: magic "MSC1", spec header, layer table
// (name, dims), then the flat values. Write -> read round-trips bit-exactly.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace imfdiag

#endif  // IMFDIAG_MSCNN_HPP_
