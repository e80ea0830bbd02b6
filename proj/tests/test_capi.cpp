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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "imfdiag/imfdiag.h"
#include "oracles.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("imfdiag_capi_" +
            std::to_string(imfdiag::SplitMix64(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("version and last_error basics") {
  CHECK(imfdiag_version() != nullptr);
  CHECK(std::strlen(imfdiag_version()) > 0);
}

TEST_CASE("signal create/accessors/free") {
  const std::vector<double> samples = oracles::sine(100.0, 40000.0, 256);
  imfdiag_signal* sig = nullptr;
  REQUIRE(imfdiag_signal_create(samples.data(), samples.size(), 40000.0,
                                &sig) == IMFDIAG_OK);
  CHECK(imfdiag_signal_length(sig) == 256);
  CHECK(imfdiag_signal_rate(sig) == 40000.0);
  CHECK(imfdiag_signal_samples(sig)[10] == samples[10]);
  imfdiag_signal_free(sig);
}

TEST_CASE("signal create rejects bad input with a message") {
  imfdiag_signal* sig = nullptr;
  const double nan_sample = std::nan("");
  CHECK(imfdiag_signal_create(&nan_sample, 1, 40000.0, &sig) ==
        IMFDIAG_ERR_INVALID);
  CHECK(std::strlen(imfdiag_last_error()) > 0);
  CHECK(imfdiag_signal_create(nullptr, 4, 40000.0, &sig) ==
        IMFDIAG_ERR_INVALID);
}

TEST_CASE("signal load: missing file is an IO error") {
  imfdiag_signal* sig = nullptr;
  CHECK(imfdiag_signal_load("/definitely/not/here.csv", "csv", 40000.0,
                            &sig) == IMFDIAG_ERR_IO);
  CHECK(imfdiag_signal_load("whatever.csv", "parquet", 40000.0, &sig) ==
        IMFDIAG_ERR_INVALID);
}

TEST_CASE("ceemdan through the C surface: shape, reconstruction, csv") {
  TempDir tmp;
  const std::vector<double> x = oracles::add(
      oracles::sine(50.0, 40000.0, 2000), oracles::sine(500.0, 40000.0, 2000));
  imfdiag_signal* sig = nullptr;
  REQUIRE(imfdiag_signal_create(x.data(), x.size(), 40000.0, &sig) ==
          IMFDIAG_OK);

  imfdiag_ceemdan_options opts;
  imfdiag_ceemdan_options_init(&opts);
  opts.nr = 4;
  opts.seed = 9;

  imfdiag_imfset* set = nullptr;
  REQUIRE(imfdiag_ceemdan_run(sig, &opts, &set) == IMFDIAG_OK);
  CHECK(imfdiag_imfset_k(set) == 10);
  CHECK(imfdiag_imfset_length(set) == 2000);
  CHECK(imfdiag_imfset_imf(set, 10) == nullptr);  // out of range

  // Reconstruction through the raw row pointers.
  std::vector<double> sum(2000, 0.0);
  for (uint32_t k = 0; k < 10; ++k) {
    const double* row = imfdiag_imfset_imf(set, k);
    REQUIRE(row != nullptr);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += row[i];
  }
  const double* res = imfdiag_imfset_residual(set);
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += res[i];
  double err = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i)
    err = std::max(err, std::fabs(sum[i] - x[i]));
  CHECK(err <= 1e-6 * oracles::max_abs(x));

  const std::string csv = (tmp.path / "set.csv").string();
  REQUIRE(imfdiag_imfset_write_csv(set, csv.c_str()) == IMFDIAG_OK);
  imfdiag_imfset* back = nullptr;
  REQUIRE(imfdiag_imfset_read_csv(csv.c_str(), &back) == IMFDIAG_OK);
  CHECK(imfdiag_imfset_length(back) == 2000);
  for (uint32_t k = 0; k < 10; ++k)
    CHECK(std::memcmp(imfdiag_imfset_imf(back, k), imfdiag_imfset_imf(set, k),
                      2000 * sizeof(double)) == 0);

  imfdiag_imfset_free(back);
  imfdiag_imfset_free(set);
  imfdiag_signal_free(sig);
}

TEST_CASE("ceemdan rejects invalid options through the C surface") {
  const std::vector<double> x = oracles::sine(100.0, 40000.0, 500);
  imfdiag_signal* sig = nullptr;
  REQUIRE(imfdiag_signal_create(x.data(), x.size(), 40000.0, &sig) ==
          IMFDIAG_OK);
  imfdiag_ceemdan_options opts;
  imfdiag_ceemdan_options_init(&opts);
  opts.nr = 0;
  imfdiag_imfset* set = nullptr;
  CHECK(imfdiag_ceemdan_run(sig, &opts, &set) == IMFDIAG_ERR_INVALID);
  CHECK(std::strlen(imfdiag_last_error()) > 0);
  imfdiag_signal_free(sig);
}

TEST_CASE("preprocess/train/evaluate pipeline through the C surface") {
  TempDir tmp;
  // Two short synthetic records, one per class.
  imfdiag::SplitMix64 rng(55);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> samples =
        oracles::sine(c == 0 ? 500.0 : 1800.0, 40000.0, 800);
    for (double& v : samples) v += 0.2 * (rng.next_unit() - 0.5);
    std::ofstream out(tmp.path / (std::string(c ? "d" : "h") + ".csv"));
    for (double v : samples) out << v << "\n";
  }
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "h.csv,AN3,healthy\nd.csv,AN3,damaged\n";
  }

  imfdiag_ceemdan_options ceemdan;
  imfdiag_ceemdan_options_init(&ceemdan);
  ceemdan.nr = 2;
  ceemdan.seed = 4;

  const std::string cache = (tmp.path / "cache").string();
  REQUIRE(imfdiag_preprocess((tmp.path / "manifest.csv").string().c_str(),
                             100, 8, 11, &ceemdan, 40000.0, 2,
                             cache.c_str()) == IMFDIAG_OK);
  CHECK(fs::exists(fs::path(cache) / "index.csv"));

  imfdiag_train_options topts;
  imfdiag_train_options_init(&topts);
  topts.train_frac = 0.5;
  topts.val_frac = 0.25;
  topts.lr = 1e-3;
  topts.max_epochs = 3;
  topts.patience = 3;
  topts.seed = 8;

  const std::string ckpt = (tmp.path / "model.bin").string();
  const std::string report = (tmp.path / "report").string();
  double best_loss = -1.0;
  uint32_t epochs = 0;
  REQUIRE(imfdiag_train(cache.c_str(), &topts, ckpt.c_str(), report.c_str(),
                        &best_loss, &epochs) == IMFDIAG_OK);
  CHECK(epochs == 3);
  CHECK(best_loss >= 0.0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(fs::path(report) / "history.csv"));
  CHECK(fs::exists(fs::path(report) / "loss.svg"));

  imfdiag_metrics m{};
  REQUIRE(imfdiag_evaluate(cache.c_str(), ckpt.c_str(), &topts, "test",
                           report.c_str(), &m) == IMFDIAG_OK);
  CHECK(m.tp + m.fp + m.tn + m.fn == 4);  // 16 windows * 0.25 test share
  CHECK(m.accuracy >= 0.0);
  CHECK(m.accuracy <= 1.0);
  CHECK(fs::exists(fs::path(report) / "metrics.csv"));
  CHECK(m.train_seconds_per_epoch >= 0.0);

  // Unknown split name surfaces as invalid.
  CHECK(imfdiag_evaluate(cache.c_str(), ckpt.c_str(), &topts, "holdout",
                         nullptr, &m) == IMFDIAG_ERR_INVALID);
}

TEST_CASE("null arguments are rejected uniformly") {
  CHECK(imfdiag_preprocess(nullptr, 100, 1, 0, nullptr, 0, 1, nullptr) ==
        IMFDIAG_ERR_INVALID);
  CHECK(imfdiag_train(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        IMFDIAG_ERR_INVALID);
  imfdiag_metrics m{};
  CHECK(imfdiag_evaluate(nullptr, nullptr, nullptr, nullptr, nullptr, &m) ==
        IMFDIAG_ERR_INVALID);
  CHECK(imfdiag_sweep_params(nullptr, nullptr, nullptr, nullptr) ==
        IMFDIAG_ERR_INVALID);
  CHECK(imfdiag_sweep_duration(nullptr, nullptr, 0, nullptr, nullptr) ==
        IMFDIAG_ERR_INVALID);
}
