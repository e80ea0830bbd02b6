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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "errors.hpp"
#include "mscnn.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace imfdiag;
namespace fs = std::filesystem;

namespace {

IMFSet make_imfset(int k, int len, std::uint64_t seed, double freq = 4.0) {
  IMFSet set;
  SplitMix64 rng(seed);
  for (int b = 0; b < k; ++b) {
    std::vector<double> row =
        oracles::sine(freq * (b + 1), static_cast<double>(len), len, 1.0,
                      rng.next_unit() * 6.28);
    for (double& v : row) v += 0.05 * (rng.next_unit() - 0.5);
    set.imfs.push_back(std::move(row));
  }
  set.residual.assign(static_cast<std::size_t>(len), 0.0);
  return set;
}

// Two classes separated by branch frequency content.
WindowedDataset toy_dataset(int n, int len, std::uint64_t seed) {
  WindowedDataset ds;
  ds.window_len = len;
  ds.sample_rate_hz = static_cast<double>(len);
  ds.decomposed = true;
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    ds.imfsets.push_back(
        make_imfset(10, len, seed + static_cast<std::uint64_t>(i) * 7919,
                    label == 0 ? 2.0 : 5.0));
    ds.labels.push_back(label);
    ds.provenance.push_back({"toy", "ch", i});
  }
  return ds;
}

ModelSpec toy_spec(int len = 32) {
  ModelSpec spec;
  spec.input_len = len;
  return spec;
}

}  // namespace

TEST_CASE("branch_flatten_len: production window and edge cases") {
  ModelSpec spec = toy_spec(20000);
  CHECK(branch_flatten_len(spec) == 79952);  // 16 * 4997
  spec.input_len = 24;
  CHECK(branch_flatten_len(spec) == 48);  // 16 * 3
  spec.input_len = 23;
  CHECK_THROWS_AS(branch_flatten_len(spec), InvalidArgument);
}

TEST_CASE("build: parameter count is a pure function of the spec") {
  const ModelSpec spec = toy_spec(32);
  const ModelParams a = build(spec, 1);
  const ModelParams b = build(spec, 1);
  const ModelParams c = build(spec, 2);
  CHECK(a.values.size() == b.values.size());
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);

  // 10 branches of (8*5 + 8 + 16*8*5 + 16) plus the head.
  const int flat = branch_flatten_len(spec);
  const std::size_t expected = 10u * (40 + 8 + 640 + 16) +
                               32u * 10u * static_cast<std::size_t>(flat) +
                               32u + 2u * 32u + 2u;
  CHECK(a.values.size() == expected);

  // Biases start at zero.
  for (const ParamEntry& e : a.layout) {
    if (!e.name.ends_with(".b")) continue;
    const auto seg = a.segment(&e - a.layout.data());
    for (double v : seg) CHECK(v == 0.0);
  }
}

TEST_CASE("forward: shape oracle at the production window length") {
  const ModelSpec spec = toy_spec(20000);
  const ModelParams params = build(spec, 3);
  const IMFSet sample = make_imfset(10, 20000, 5);
  ForwardCache cache;
  const auto probs = forward(params, sample, Mode::infer, 0, cache);
  CHECK(cache.concat.size() == 799520);  // 10 * 79952
  CHECK(std::fabs(probs[0] + probs[1] - 1.0) <= 1e-12);
}

TEST_CASE("forward: probabilities form a distribution; infer is "
          "deterministic") {
  const ModelSpec spec = toy_spec(32);
  const ModelParams params = build(spec, 7);
  const IMFSet sample = make_imfset(10, 32, 9);
  ForwardCache cache;
  const auto p1 = forward(params, sample, Mode::infer, 123, cache);
  const auto p2 = forward(params, sample, Mode::infer, 456, cache);
  CHECK(p1 == p2);  // no stochastic layers active
  CHECK(p1[0] > 0.0);
  CHECK(p1[1] > 0.0);
  CHECK(std::fabs(p1[0] + p1[1] - 1.0) <= 1e-12);
}

TEST_CASE("forward: wrong sample shape is an error") {
  const ModelSpec spec = toy_spec(32);
  const ModelParams params = build(spec, 7);
  ForwardCache cache;
  CHECK_THROWS_AS(forward(params, make_imfset(9, 32, 1), Mode::infer, 0, cache),
                  InvalidArgument);
  CHECK_THROWS_AS(forward(params, make_imfset(10, 40, 1), Mode::infer, 0, cache),
                  InvalidArgument);
}

TEST_CASE("forward: zeroed branch input with zero biases gives zero "
          "features") {
  const ModelSpec spec = toy_spec(32);
  ModelParams params = build(spec, 11);
  // Branch 3 biases are already zero from init; zero its input row too.
  IMFSet sample = make_imfset(10, 32, 13);
  sample.imfs[3].assign(32, 0.0);
  ForwardCache cache;
  forward(params, sample, Mode::infer, 0, cache);
  const int flat = branch_flatten_len(spec);
  for (int i = 3 * flat; i < 4 * flat; ++i)
    CHECK(cache.concat[static_cast<std::size_t>(i)] == 0.0);
}

TEST_CASE("full model gradients match central differences (toy, k=2)") {
  ModelSpec spec = toy_spec(32);
  spec.k_branches = 2;
  const ModelParams params = build(spec, 17);
  const IMFSet sample = make_imfset(2, 32, 19);
  const int label = 1;

  ForwardCache cache;
  forward(params, sample, Mode::infer, 0, cache);
  const SoftmaxXent sx = softmax_xent(cache.logits, label);
  std::vector<double> grads(params.values.size(), 0.0);
  std::vector<Tensor> grad_inputs;
  backward(params, cache, sx.grad_logits, grads, &grad_inputs);

  // Point = [params; standardized inputs]; the loss closure mirrors that.
  std::vector<BranchCache> std_rows;
  standardize_rows(sample, spec, std_rows);
  std::vector<double> point = params.values;
  for (const BranchCache& br : std_rows)
    point.insert(point.end(), br.in_std.data.begin(), br.in_std.data.end());
  std::vector<double> analytic = grads;
  for (const Tensor& g : grad_inputs)
    analytic.insert(analytic.end(), g.data.begin(), g.data.end());

  auto loss_at = [&](std::span<const double> pt) {
    ModelParams p = params;
    std::copy(pt.begin(), pt.begin() + static_cast<std::ptrdiff_t>(
                                           params.values.size()),
              p.values.begin());
    ForwardCache c;
    c.branches.resize(2);
    std::size_t off = params.values.size();
    for (int b = 0; b < 2; ++b) {
      c.branches[static_cast<std::size_t>(b)].in_std.resize(1, 32);
      std::copy(pt.begin() + static_cast<std::ptrdiff_t>(off),
                pt.begin() + static_cast<std::ptrdiff_t>(off + 32),
                c.branches[static_cast<std::size_t>(b)].in_std.data.begin());
      off += 32;
    }
    forward_network(p, Mode::infer, 0, c);
    return softmax_xent(c.logits, label).loss;
  };

  const double err = grad_check(loss_at, point, analytic, 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("EarlyStopping: strictly worsening loss stops at patience+1 with "
          "best_epoch 1") {
  EarlyStopping es(15);
  bool stopped = false;
  int stop_epoch = 0;
  for (int epoch = 1; epoch <= 100; ++epoch) {
    if (es.observe(epoch, 1.0 + 0.1 * epoch)) {
      stopped = true;
      stop_epoch = epoch;
      break;
    }
  }
  CHECK(stopped);
  CHECK(stop_epoch == 16);
  CHECK(es.best_epoch() == 1);
}

TEST_CASE("EarlyStopping: improvements below min_delta count as stale") {
  EarlyStopping es(3, 1e-6);
  CHECK_FALSE(es.observe(1, 1.0));
  CHECK_FALSE(es.observe(2, 1.0 - 1e-9));  // too small to count
  CHECK_FALSE(es.observe(3, 1.0 - 2e-9));
  CHECK(es.observe(4, 1.0 - 3e-9));
  CHECK(es.best_epoch() == 1);
}

TEST_CASE("EarlyStopping: steady improvement never stops") {
  EarlyStopping es(2);
  for (int epoch = 1; epoch <= 50; ++epoch)
    CHECK_FALSE(es.observe(epoch, 1.0 / epoch));
  CHECK(es.best_epoch() == 50);
}

TEST_CASE("fit: bit-identical runs under the same seed") {
  const WindowedDataset train = toy_dataset(8, 32, 100);
  const WindowedDataset val = toy_dataset(4, 32, 200);
  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.seed = 31;
  const FitResult a = fit(train, val, toy_spec(32), cfg);
  const FitResult b = fit(train, val, toy_spec(32), cfg);
  CHECK(a.params.values == b.params.values);
  REQUIRE(a.history.epochs.size() == b.history.epochs.size());
  for (std::size_t e = 0; e < a.history.epochs.size(); ++e) {
    CHECK(a.history.epochs[e].train_loss == b.history.epochs[e].train_loss);
    CHECK(a.history.epochs[e].val_loss == b.history.epochs[e].val_loss);
    CHECK(a.history.epochs[e].val_acc == b.history.epochs[e].val_acc);
  }
}

TEST_CASE("fit: returns weights from the best validation epoch") {
  const WindowedDataset train = toy_dataset(8, 32, 300);
  const WindowedDataset val = toy_dataset(4, 32, 400);
  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.max_epochs = 12;
  cfg.patience = 12;
  cfg.seed = 77;
  const FitResult r = fit(train, val, toy_spec(32), cfg);
  REQUIRE(!r.history.epochs.empty());
  double best = r.history.epochs.front().val_loss;
  for (const EpochStats& e : r.history.epochs) best = std::min(best, e.val_loss);
  double best_recorded = 0.0;
  for (const EpochStats& e : r.history.epochs)
    if (e.epoch == r.history.best_epoch) best_recorded = e.val_loss;
  CHECK(best_recorded == best);
}

TEST_CASE("fit: rejects bad inputs") {
  const WindowedDataset train = toy_dataset(4, 32, 1);
  const WindowedDataset val = toy_dataset(2, 32, 2);
  WindowedDataset empty;
  empty.decomposed = true;
  TrainConfig cfg;
  CHECK_THROWS_AS(fit(empty, val, toy_spec(32), cfg), InvalidArgument);
  TrainConfig bad = cfg;
  bad.patience = 200;  // exceeds max_epochs
  CHECK_THROWS_AS(fit(train, val, toy_spec(32), bad), InvalidArgument);
}

TEST_CASE("predict: exact ties resolve to label 0") {
  const ModelSpec spec = toy_spec(32);
  ModelParams params = build(spec, 5);
  std::fill(params.values.begin(), params.values.end(), 0.0);
  WindowedDataset ds = toy_dataset(3, 32, 500);
  const PredictResult r = predict(params, ds);
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    CHECK(r.probs[i][0] == 0.5);
    CHECK(r.probs[i][1] == 0.5);
    CHECK(r.labels[i] == 0);
  }
  CHECK(r.ms_per_sample >= 0.0);
}

TEST_CASE("predict: agrees with fit's training-set predictions") {
  const WindowedDataset train = toy_dataset(8, 32, 800);
  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.max_epochs = 30;
  cfg.patience = 30;
  cfg.seed = 9;
  const FitResult r = fit(train, train, toy_spec(32), cfg);
  const PredictResult pred = predict(r.params, train);
  // The returned params are the best-epoch weights, so re-predicting the
  // training set must reproduce the recorded best val (== train) accuracy.
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (pred.labels[i] == train.labels[i]) ++correct;
  double best_acc = 0.0;
  for (const EpochStats& e : r.history.epochs)
    if (e.epoch == r.history.best_epoch) best_acc = e.val_acc;
  CHECK(static_cast<double>(correct) / static_cast<double>(train.size()) ==
        doctest::Approx(best_acc).epsilon(1e-12));
}

TEST_CASE("checkpoint: round-trips bit-exactly") {
  const ModelSpec spec = toy_spec(48);
  const ModelParams params = build(spec, 21);
  const std::string path =
      (fs::temp_directory_path() / "imfdiag_ckpt_test.bin").string();
  save_checkpoint(params, path);
  const ModelParams back = load_checkpoint(path);
  CHECK(back.values == params.values);
  CHECK(back.spec.input_len == spec.input_len);
  CHECK(back.spec.k_branches == spec.k_branches);
  REQUIRE(back.layout.size() == params.layout.size());
  for (std::size_t i = 0; i < back.layout.size(); ++i) {
    CHECK(back.layout[i].name == params.layout[i].name);
    CHECK(back.layout[i].dims == params.layout[i].dims);
    CHECK(back.layout[i].offset == params.layout[i].offset);
  }
  fs::remove(path);
}

TEST_CASE("checkpoint: rejects foreign files") {
  const std::string path =
      (fs::temp_directory_path() / "imfdiag_ckpt_bad.bin").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("XXXXnot a checkpoint", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(path), DataError);
  fs::remove(path);
}
