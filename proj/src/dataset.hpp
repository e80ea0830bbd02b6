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

#ifndef IMFDIAG_DATASET_HPP_
#define IMFDIAG_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ceemdan.hpp"
#include "signal.hpp"

namespace imfdiag {

enum class Condition { healthy = 0, damaged = 1 };

struct RawRecord {
  std::string source_path;  // identifies the record in provenance
  std::string channel_id;   // e.g. "AN3".."AN7", "AN9", "AN10"
  Condition condition = Condition::healthy;
  Signal signal;
};

enum class FileFormat { csv, f64le, auto_detect };

// csv: one real per line. f64le: 16-byte header (magic "VIB1", u32 sample
// rate, u32 sample count, u32 reserved) followed by little-endian doubles.
// auto_detect sniffs the magic. NaN/Inf samples are rejected with their
// index; CSV parse errors carry the line number.
Signal load_channel(const std::string& path, FileFormat format,
                    double csv_sample_rate_hz = 40000.0);
void write_channel_f64le(const Signal& s, const std::string& path);
void write_channel_csv(const Signal& s, const std::string& path);

// Manifest: one "path,channel_id,condition" triple per line, condition in
// {healthy, damaged}. Lines starting with '#' are skipped. Relative paths
// resolve against the manifest's directory.
std::vector<RawRecord> load_manifest(const std::string& manifest_path,
                                     double csv_sample_rate_hz = 40000.0);

// First `count` contiguous non-overlapping windows of length window_len.
std::vector<std::vector<double>> window(const Signal& signal, int window_len,
                                        int count);

struct SampleProvenance {
  std::string file;     // record stem, filesystem-safe
  std::string channel;
  int window_index = 0;
};

struct WindowedDataset {
  int window_len = 0;
  double sample_rate_hz = 0.0;
  bool decomposed = false;
  std::vector<std::vector<double>> windows;  // populated when !decomposed
  std::vector<IMFSet> imfsets;               // populated when decomposed
  std::vector<int> labels;                   // 0 healthy, 1 damaged
  std::vector<SampleProvenance> provenance;

  std::size_t size() const { return labels.size(); }
};

// Windows every record, labels from its condition, then applies one seeded
// Fisher-Yates shuffle to samples, labels and provenance in lockstep.
WindowedDataset build_dataset(const std::vector<RawRecord>& records,
                              int window_len, int windows_per_record,
                              std::uint64_t seed);

struct SplitResult {
  WindowedDataset train, val, test;
};

// Contiguous split of the already-shuffled dataset into floor(n*train_frac),
// floor(n*val_frac) and the remainder. The seed parameter is accepted for
// interface stability but unused: the split is fully determined by the
// dataset order.
SplitResult split(const WindowedDataset& ds, double train_frac,
                  double val_frac, std::uint64_t seed = 0);

// Replaces every window with its CEEMDAN decomposition. The per-window seed
// is derived from cfg.seed and the sample's provenance, so results do not
// depend on processing order and the windows may be decomposed on n_threads
// in parallel.
WindowedDataset decompose_all(const WindowedDataset& ds,
                              const CeemdanConfig& cfg,
                              const SiftConfig& sift_cfg, int n_threads = 1);

// Cache directory: one IMFSet CSV per sample named
// <file>_<channel>_<windowidx>_<label>.csv, plus index.csv recording the
// dataset order so a reload reproduces the shuffle exactly.
void write_cache(const WindowedDataset& ds, const std::string& dir);
WindowedDataset read_cache(const std::string& dir);

}  // namespace imfdiag

#endif  // IMFDIAG_DATASET_HPP_
