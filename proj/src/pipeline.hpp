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

#ifndef IMFDIAG_PIPELINE_HPP_
#define IMFDIAG_PIPELINE_HPP_

#include <cstdint>
#include <string>

#include "dataset.hpp"
#include "metrics.hpp"
#include "mscnn.hpp"

namespace imfdiag {

struct PreprocessOptions {
  int window_len = 20000;
  int windows_per_record = 10;
  std::uint64_t seed = 42;
  CeemdanConfig ceemdan;
  SiftConfig sift;
  double csv_sample_rate_hz = 40000.0;
  int threads = 1;
};

// Manifest -> windowed/labeled/shuffled/decomposed samples -> cache dir.
void preprocess(const std::string& manifest_path,
                const PreprocessOptions& opts, const std::string& cache_dir);

struct TrainPipelineOptions {
  double train_frac = 0.7;
  double val_frac = 0.1;
  TrainConfig train;
};

struct TrainOutcome {
  TrainHistory history;
  double median_epoch_seconds = 0.0;
};

// Cache -> split -> fit -> checkpoint + history.csv/loss.svg in report_dir.
TrainOutcome train_pipeline(const std::string& cache_dir,
                            const TrainPipelineOptions& opts,
                            const std::string& checkpoint_path,
                            const std::string& report_dir);

enum class SplitPart { train, val, test, all };
SplitPart parse_split_part(const std::string& name);

// Cache + checkpoint -> metrics.csv in report_dir. The split fractions must
// match the training run for the held-out partition to line up; training
// epoch seconds are recovered from report_dir/history.csv when present.
Metrics evaluate_pipeline(const std::string& cache_dir,
                          const std::string& checkpoint_path,
                          const TrainPipelineOptions& opts, SplitPart part,
                          const std::string& report_dir);

}  // namespace imfdiag

#endif  // IMFDIAG_PIPELINE_HPP_
