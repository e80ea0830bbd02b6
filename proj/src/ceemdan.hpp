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

#ifndef IMFDIAG_CEEMDAN_HPP_
#define IMFDIAG_CEEMDAN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "signal.hpp"

namespace imfdiag {

struct CeemdanConfig {
  std::uint32_t nr = 50;        // ensemble realizations
  std::uint32_t max_iter = 250; // total sift budget, spread over the k stages
  int snr_flag = 1;             // 1: noise std tracks the running residual
  double epsilon = 0.2;         // noise amplitude coefficient
  std::uint32_t k = 10;         // IMF rows, always exactly this many
  std::uint64_t seed = 0;
};

void validate_ceemdan_config(const CeemdanConfig& cfg);

// Fixed-size decomposition of one window: exactly k IMF rows plus the final
// residual, all of the source length. Rows the decomposition could not
// reach are zero-filled, so downstream consumers always see a k x L block.
struct IMFSet {
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;
  // Provenance of the decomposition, carried into the CSV header.
  std::uint64_t seed = 0;
  std::uint32_t nr = 0;
  std::uint32_t max_iter = 0;
  int snr_flag = 1;
  double epsilon = 0.2;

  int k() const { return static_cast<int>(imfs.size()); }
  std::size_t source_length() const { return residual.size(); }
};

// Ensemble-averaged noise-assisted decomposition. Stage 1 averages the
// first IMFs of nr noisy copies of the input; stage k >= 2 averages the
// first IMFs of r_{k-1} + eps_eff * sum(IMF_1..IMF_{k-1}) + w_r, then
// updates the residual. eps_eff is epsilon times the std of the running
// residual (snr_flag = 1) or of the input (snr_flag = 0); when that std is
// zero no noise is injected. Bit-deterministic for a given seed: realization
// streams are derived per (stage, r) and averaged in ascending r.
IMFSet ceemdan(const Signal& signal, const CeemdanConfig& cfg,
               const SiftConfig& sift_cfg);

// Element-wise sum(imfs) + residual.
std::vector<double> reconstruct(const IMFSet& set);

// CSV with a one-line header followed by k IMF rows and the residual row,
// one column per sample. Values round-trip bit-exactly.
void write_imfset_csv(const IMFSet& set, const std::string& path);
IMFSet read_imfset_csv(const std::string& path);

}  // namespace imfdiag

#endif  // IMFDIAG_CEEMDAN_HPP_
