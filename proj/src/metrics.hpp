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

#ifndef IMFDIAG_METRICS_HPP_
#define IMFDIAG_METRICS_HPP_

#include <cstdint>
#include <span>

namespace imfdiag {

// Binary confusion counts and derived scores. Damaged (label 1) is the
// positive class: a missed fault is the costly error.
struct Metrics {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double train_seconds_per_epoch = 0.0;
  double test_ms_per_sample = 0.0;
};

struct TimingInfo {
  double train_seconds_per_epoch = 0.0;
  double test_ms_per_sample = 0.0;
};

// Precision/recall/F1 use the defined-zero convention for degenerate
// denominators.
Metrics compute_metrics(std::span<const int> predicted,
                        std::span<const int> actual, TimingInfo timing = {});

}  // namespace imfdiag

#endif  // IMFDIAG_METRICS_HPP_
