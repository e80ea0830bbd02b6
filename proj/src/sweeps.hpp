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

#ifndef IMFDIAG_SWEEPS_HPP_
#define IMFDIAG_SWEEPS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ceemdan.hpp"
#include "dataset.hpp"
#include "mscnn.hpp"

namespace imfdiag {

struct SweepSettings {
  int window_len = 20000;
  int windows_per_record = 10;
  CeemdanConfig ceemdan;  // nr/max_iter/snr_flag overridden per cell
  SiftConfig sift;
  TrainConfig train;
  double train_frac = 0.7;
  double val_frac = 0.1;
  double csv_sample_rate_hz = 40000.0;
  int threads = 1;
  std::uint64_t seed = 42;  // master seed; per-stage seeds derive from it
};

struct ParamCell {
  std::uint32_t nr = 50;
  std::uint32_t max_iter = 250;
  int snr_flag = 1;
};

// The eight tuning rows: NR in {25,50,75,100} at (250,1), NR=50 with
// MaxIter in {100,250,500}, and the (50,250,0) flag-off row.
std::vector<ParamCell> default_param_grid();

// Grid CSV: header nr,max_iter,snr_flag then one cell per row.
std::vector<ParamCell> read_param_grid_csv(const std::string& path);

struct ParamResult {
  ParamCell cell;
  double val_accuracy = 0.0;
  bool ok = false;
  std::string error;
};

// Decompose/split/train per cell and record the best validation accuracy.
// Results accumulate in <report_dir>/param_sweep.csv; cells already present
// there are skipped, so an interrupted sweep resumes where it stopped.
// Per-cell failures are recorded and the sweep continues.
std::vector<ParamResult> param_sweep(const std::string& manifest_path,
                                     const std::vector<ParamCell>& grid,
                                     const SweepSettings& settings,
                                     const std::string& report_dir);

struct DurationResult {
  double duration_s = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  bool ok = false;
  std::string error;
};

// Re-windows at L = duration * sample rate, retrains a fresh model per
// duration (dense shapes depend on L) and evaluates on the held-out test
// split. Emits duration_sweep.csv plus sweep.svg; resumable like
// param_sweep.
std::vector<DurationResult> duration_sweep(const std::string& manifest_path,
                                           const std::vector<double>& durations,
                                           const SweepSettings& settings,
                                           const std::string& report_dir);

}  // namespace imfdiag

#endif  // IMFDIAG_SWEEPS_HPP_
