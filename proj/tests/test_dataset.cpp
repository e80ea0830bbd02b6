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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace imfdiag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("imfdiag_test_" + std::to_string(SplitMix64(
                                  std::random_device{}())
                                                 .next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<RawRecord> synthetic_records(int n_per_class, int samples,
                                         double rate = 40000.0) {
  std::vector<RawRecord> records;
  SplitMix64 rng(404);
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < n_per_class; ++r) {
      RawRecord rec;
      rec.source_path = (c ? "damaged" : "healthy") + std::to_string(r);
      rec.channel_id = "AN" + std::to_string(3 + r % 7);
      rec.condition = c ? Condition::damaged : Condition::healthy;
      rec.signal.sample_rate_hz = rate;
      rec.signal.samples = oracles::sine(100.0 + 50.0 * c, rate, samples);
      for (double& v : rec.signal.samples) v += 0.1 * (rng.next_unit() - 0.5);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace

TEST_CASE("load_channel: csv basics") {
  TempDir tmp;
  const std::string path = (tmp.path / "chan.csv").string();
  {
    std::ofstream out(path);
    out << "1.0\n2.0\n3.0\n";
  }
  const Signal s = load_channel(path, FileFormat::csv, 40000.0);
  CHECK(s.samples == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.sample_rate_hz == 40000.0);
}

TEST_CASE("load_channel: csv parse errors carry the line number") {
  TempDir tmp;
  const std::string path = (tmp.path / "bad.csv").string();
  {
    std::ofstream out(path);
    out << "1.0\nnot-a-number\n";
  }
  try {
    load_channel(path, FileFormat::csv, 40000.0);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_channel: csv rejects non-finite samples with index") {
  TempDir tmp;
  const std::string path = (tmp.path / "naninf.csv").string();
  {
    std::ofstream out(path);
    out << "1.0\nnan\n";
  }
  try {
    load_channel(path, FileFormat::csv, 40000.0);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("f64le: write/read round-trip is bit-identical") {
  TempDir tmp;
  const std::string path = (tmp.path / "chan.vib").string();
  Signal s;
  s.sample_rate_hz = 40000.0;
  SplitMix64 rng(8);
  s.samples.resize(4096);
  for (double& v : s.samples) v = rng.next_unit() * 2.0 - 1.0;
  write_channel_f64le(s, path);
  const Signal back = load_channel(path, FileFormat::f64le, 0.0);
  CHECK(back.samples == s.samples);
  CHECK(back.sample_rate_hz == 40000.0);

  // auto_detect sniffs the magic
  const Signal sniffed = load_channel(path, FileFormat::auto_detect, 0.0);
  CHECK(sniffed.samples == s.samples);
}

TEST_CASE("window: contiguous non-overlapping slices from the front") {
  Signal s;
  s.sample_rate_hz = 10.0;
  for (int i = 0; i < 10; ++i) s.samples.push_back(i);
  const auto w = window(s, 5, 2);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == std::vector<double>{0, 1, 2, 3, 4});
  CHECK(w[1] == std::vector<double>{5, 6, 7, 8, 9});
  CHECK_THROWS_AS(window(s, 5, 3), InvalidArgument);
}

TEST_CASE("build_dataset: counts, balance, determinism") {
  const auto records = synthetic_records(3, 1000);
  const WindowedDataset ds = build_dataset(records, 100, 5, 99);
  CHECK(ds.size() == 30);
  CHECK(std::count(ds.labels.begin(), ds.labels.end(), 0) == 15);
  CHECK(std::count(ds.labels.begin(), ds.labels.end(), 1) == 15);

  const WindowedDataset again = build_dataset(records, 100, 5, 99);
  CHECK(ds.windows == again.windows);
  CHECK(ds.labels == again.labels);

  const WindowedDataset other = build_dataset(records, 100, 5, 100);
  CHECK(ds.windows != other.windows);
}

TEST_CASE("build_dataset: shuffle is a permutation of (window,label)") {
  const auto records = synthetic_records(2, 600);
  const WindowedDataset ds = build_dataset(records, 100, 3, 7);

  // Reconstruct the unshuffled multiset.
  std::multimap<int, std::vector<double>> expected;
  for (const RawRecord& rec : records) {
    for (int w = 0; w < 3; ++w) {
      std::vector<double> win(rec.signal.samples.begin() + w * 100,
                              rec.signal.samples.begin() + (w + 1) * 100);
      expected.insert({static_cast<int>(rec.condition), std::move(win)});
    }
  }
  REQUIRE(ds.size() == expected.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto range = expected.equal_range(ds.labels[i]);
    bool found = false;
    for (auto it = range.first; it != range.second; ++it) {
      if (it->second == ds.windows[i]) {
        expected.erase(it);
        found = true;
        break;
      }
    }
    CHECK(found);
  }
  CHECK(expected.empty());
}

TEST_CASE("build_dataset: single record, single window") {
  auto records = synthetic_records(1, 200);
  records.resize(1);
  const WindowedDataset ds = build_dataset(records, 200, 1, 0);
  CHECK(ds.size() == 1);
  CHECK(ds.labels[0] == 0);
}

TEST_CASE("split: floor arithmetic matches the 1400-sample layout") {
  WindowedDataset ds;
  ds.window_len = 4;
  ds.sample_rate_hz = 1.0;
  for (int i = 0; i < 1400; ++i) {
    ds.windows.push_back({0, 0, 0, 0});
    ds.labels.push_back(i % 2);
    ds.provenance.push_back({"f", "c", i});
  }
  const SplitResult parts = split(ds, 0.7, 0.1);
  CHECK(parts.train.size() == 980);
  CHECK(parts.val.size() == 140);
  CHECK(parts.test.size() == 280);
}

TEST_CASE("split: small dataset and error cases") {
  WindowedDataset ds;
  ds.window_len = 1;
  ds.sample_rate_hz = 1.0;
  for (int i = 0; i < 10; ++i) {
    ds.windows.push_back({1.0});
    ds.labels.push_back(i % 2);
    ds.provenance.push_back({"f", "c", i});
  }
  const SplitResult parts = split(ds, 0.8, 0.1);
  CHECK(parts.train.size() == 8);
  CHECK(parts.val.size() == 1);
  CHECK(parts.test.size() == 1);

  CHECK_THROWS_AS(split(ds, 0.8, 0.3), InvalidArgument);
  CHECK_THROWS_AS(split(ds, 0.0, 0.1), InvalidArgument);

  WindowedDataset tiny;
  tiny.window_len = 1;
  tiny.sample_rate_hz = 1.0;
  tiny.windows.push_back({1.0});
  tiny.labels.push_back(0);
  tiny.provenance.push_back({"f", "c", 0});
  CHECK_THROWS_AS(split(tiny, 0.5, 0.2), InvalidArgument);
}

TEST_CASE("split: partitions are disjoint and exhaustive") {
  const auto records = synthetic_records(2, 1200);
  const WindowedDataset ds = build_dataset(records, 100, 6, 5);
  const SplitResult parts = split(ds, 0.6, 0.2);
  CHECK(parts.train.size() + parts.val.size() + parts.test.size() ==
        ds.size());
  std::size_t i = 0;
  for (const WindowedDataset* part : {&parts.train, &parts.val, &parts.test})
    for (std::size_t j = 0; j < part->size(); ++j, ++i)
      CHECK(part->windows[j] == ds.windows[i]);
}

TEST_CASE("decompose_all: shape contract and label preservation") {
  const auto records = synthetic_records(1, 500);
  const WindowedDataset ds = build_dataset(records, 250, 2, 3);
  CeemdanConfig cfg;
  cfg.nr = 3;
  cfg.seed = 17;
  const WindowedDataset dec = decompose_all(ds, cfg, SiftConfig{});
  CHECK(dec.decomposed);
  CHECK(dec.size() == ds.size());
  CHECK(dec.labels == ds.labels);
  for (const IMFSet& s : dec.imfsets) {
    CHECK(s.k() == 10);
    CHECK(s.source_length() == 250);
  }
  CHECK_THROWS_AS(decompose_all(dec, cfg, SiftConfig{}), InvalidArgument);
}

TEST_CASE("decompose_all: parallel equals serial bit-for-bit") {
  const auto records = synthetic_records(2, 1000);
  const WindowedDataset ds = build_dataset(records, 200, 4, 3);
  CeemdanConfig cfg;
  cfg.nr = 4;
  cfg.seed = 21;
  const WindowedDataset serial = decompose_all(ds, cfg, SiftConfig{}, 1);
  const WindowedDataset parallel = decompose_all(ds, cfg, SiftConfig{}, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial.imfsets[i].imfs == parallel.imfsets[i].imfs);
    CHECK(serial.imfsets[i].residual == parallel.imfsets[i].residual);
  }
}

TEST_CASE("cache: write and read preserve order, labels and values") {
  TempDir tmp;
  const auto records = synthetic_records(1, 600);
  const WindowedDataset ds = build_dataset(records, 150, 4, 11);
  CeemdanConfig cfg;
  cfg.nr = 2;
  cfg.seed = 5;
  const WindowedDataset dec = decompose_all(ds, cfg, SiftConfig{});
  write_cache(dec, tmp.path.string());

  const WindowedDataset back = read_cache(tmp.path.string());
  CHECK(back.decomposed);
  CHECK(back.window_len == 150);
  CHECK(back.labels == dec.labels);
  REQUIRE(back.size() == dec.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.imfsets[i].imfs == dec.imfsets[i].imfs);
    CHECK(back.imfsets[i].residual == dec.imfsets[i].residual);
    CHECK(back.provenance[i].file == dec.provenance[i].file);
    CHECK(back.provenance[i].window_index == dec.provenance[i].window_index);
  }
}

TEST_CASE("manifest: parses triples and resolves relative paths") {
  TempDir tmp;
  Signal s;
  s.sample_rate_hz = 40000.0;
  s.samples = oracles::sine(100.0, 40000.0, 300);
  write_channel_f64le(s, (tmp.path / "h0.vib").string());
  write_channel_f64le(s, (tmp.path / "d0.vib").string());
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "# comment line\n";
    out << "h0.vib,AN3,healthy\n";
    out << "d0.vib,AN4,damaged\n";
  }
  const auto records =
      load_manifest((tmp.path / "manifest.csv").string(), 40000.0);
  REQUIRE(records.size() == 2);
  CHECK(records[0].condition == Condition::healthy);
  CHECK(records[1].condition == Condition::damaged);
  CHECK(records[0].channel_id == "AN3");
  CHECK(records[1].signal.samples.size() == 300);
}

TEST_CASE("manifest: bad condition rejected") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "whatever.csv,AN3,broken\n";
  }
  CHECK_THROWS_AS(load_manifest((tmp.path / "manifest.csv").string(), 40000.0),
                  DataError);
}
