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

#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <vector>

#include "errors.hpp"
#include "report.hpp"

namespace fs = std::filesystem;

namespace imfdiag {

void preprocess(const std::string& manifest_path,
                const PreprocessOptions& opts, const std::string& cache_dir) {
  const std::vector<RawRecord> records =
      load_manifest(manifest_path, opts.csv_sample_rate_hz);
  WindowedDataset ds = build_dataset(records, opts.window_len,
                                     opts.windows_per_record, opts.seed);
  CeemdanConfig ccfg = opts.ceemdan;
  ccfg.seed = opts.seed;
  WindowedDataset decomposed =
      decompose_all(ds, ccfg, opts.sift, opts.threads);
  write_cache(decomposed, cache_dir);
}

namespace {

double median_seconds(const TrainHistory& h) {
  std::vector<double> secs;
  for (const EpochStats& e : h.epochs) secs.push_back(e.seconds);
  if (secs.empty()) return 0.0;
  std::sort(secs.begin(), secs.end());
  return secs[secs.size() / 2];
}

}  // namespace

TrainOutcome train_pipeline(const std::string& cache_dir,
                            const TrainPipelineOptions& opts,
                            const std::string& checkpoint_path,
                            const std::string& report_dir) {
  const WindowedDataset ds = read_cache(cache_dir);
  const SplitResult parts = split(ds, opts.train_frac, opts.val_frac);

  ModelSpec spec;
  spec.input_len = static_cast<int>(ds.imfsets.front().source_length());
  spec.k_branches = ds.imfsets.front().k();

  FitResult fitted = fit(parts.train, parts.val, spec, opts.train);
  save_checkpoint(fitted.params, checkpoint_path);
  if (!report_dir.empty()) report(&fitted.history, nullptr, report_dir);

  TrainOutcome out;
  out.median_epoch_seconds = median_seconds(fitted.history);
  out.history = std::move(fitted.history);
  return out;
}

SplitPart parse_split_part(const std::string& name) {
  if (name == "train") return SplitPart::train;
  if (name == "val") return SplitPart::val;
  if (name == "test") return SplitPart::test;
  if (name == "all") return SplitPart::all;
  throw InvalidArgument("unknown split partition: " + name);
}

Metrics evaluate_pipeline(const std::string& cache_dir,
                          const std::string& checkpoint_path,
                          const TrainPipelineOptions& opts, SplitPart part,
                          const std::string& report_dir) {
  const WindowedDataset ds = read_cache(cache_dir);
  const ModelParams params = load_checkpoint(checkpoint_path);

  const WindowedDataset* target = &ds;
  SplitResult parts;
  if (part != SplitPart::all) {
    parts = split(ds, opts.train_frac, opts.val_frac);
    target = part == SplitPart::train
                 ? &parts.train
                 : (part == SplitPart::val ? &parts.val : &parts.test);
  }

  const PredictResult pred = predict(params, *target);
  TimingInfo timing;
  timing.test_ms_per_sample = pred.ms_per_sample;
  if (!report_dir.empty()) {
    const fs::path hist = fs::path(report_dir) / "history.csv";
    if (fs::exists(hist)) {
      try {
        timing.train_seconds_per_epoch =
            median_seconds(read_history_csv(hist.string()));
      } catch (const Error&) {
        // evaluation proceeds without training timings
      }
    }
  }

  const Metrics m = compute_metrics(pred.labels, target->labels, timing);
  if (!report_dir.empty()) report(nullptr, &m, report_dir);
  return m;
}

}  // namespace imfdiag
