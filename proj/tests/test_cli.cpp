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

// End-to-end checks of the installed command surface: the CLI is spawned as
// a subprocess, exactly as a user would run it.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <sys/wait.h>

#include "ceemdan.hpp"
#include "dataset.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("imfdiag_cli_" +
            std::to_string(imfdiag::SplitMix64(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IMFDIAG_CLI_PATH) + " " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_csv_channel(const fs::path& path, const std::vector<double>& v) {
  std::ofstream out(path);
  out.precision(17);
  for (double x : v) out << x << "\n";
}

}  // namespace

TEST_CASE("cli: no arguments is a usage error (exit 1)") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("decompose") == 1);  // missing required flags
  CHECK(run_cli("sweep") == 1);
}

TEST_CASE("cli: --help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("decompose --help") == 0);
}

TEST_CASE("cli: decompose csv -> IMF set csv") {
  TempDir tmp;
  const auto x = oracles::add(oracles::sine(50.0, 40000.0, 1200),
                              oracles::sine(500.0, 40000.0, 1200));
  write_csv_channel(tmp.path / "chan.csv", x);
  const std::string out = (tmp.path / "set.csv").string();
  const int rc = run_cli("decompose --input " +
                         (tmp.path / "chan.csv").string() +
                         " --format csv --sample-rate 40000 --nr 3 "
                         "--max-iter 250 --snr-flag 1 --epsilon 0.2 --k 10 "
                         "--seed 7 --output " + out);
  CHECK(rc == 0);
  REQUIRE(fs::exists(out));
  const imfdiag::IMFSet set = imfdiag::read_imfset_csv(out);
  CHECK(set.k() == 10);
  CHECK(set.source_length() == 1200);
  CHECK(set.seed == 7);
  CHECK(set.nr == 3);
}

TEST_CASE("cli: decompose on a missing file is a data error (exit 2)") {
  TempDir tmp;
  CHECK(run_cli("decompose --input " + (tmp.path / "nope.csv").string() +
                " --output " + (tmp.path / "o.csv").string()) == 2);
}

TEST_CASE("cli: preprocess -> train -> evaluate round trip") {
  TempDir tmp;
  imfdiag::SplitMix64 rng(17);
  for (int c = 0; c < 2; ++c) {
    auto v = oracles::sine(c == 0 ? 400.0 : 1500.0, 40000.0, 1200);
    for (double& s : v) s += 0.25 * (rng.next_unit() - 0.5);
    write_csv_channel(tmp.path / (std::string(c ? "d" : "h") + ".csv"), v);
  }
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "h.csv,AN3,healthy\nd.csv,AN4,damaged\n";
  }

  const std::string cache = (tmp.path / "cache").string();
  CHECK(run_cli("preprocess --manifest " +
                (tmp.path / "manifest.csv").string() +
                " --window-len 120 --windows-per-record 10 --seed 5 "
                "--nr 2 --cache-dir " + cache) == 0);
  CHECK(fs::exists(fs::path(cache) / "index.csv"));

  const std::string ckpt = (tmp.path / "model.bin").string();
  const std::string report = (tmp.path / "report").string();
  CHECK(run_cli("train --cache-dir " + cache +
                " --train-frac 0.7 --val-frac 0.1 --lr 1e-3 --batch-size 16 "
                "--max-epochs 3 --patience 3 --seed 5 --checkpoint " + ckpt +
                " --report " + report) == 0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(fs::path(report) / "history.csv"));
  CHECK(fs::exists(fs::path(report) / "loss.svg"));

  CHECK(run_cli("evaluate --cache-dir " + cache + " --checkpoint " + ckpt +
                " --report " + report) == 0);
  CHECK(fs::exists(fs::path(report) / "metrics.csv"));
}

TEST_CASE("cli: numeric blow-up is reported as exit 3") {
  TempDir tmp;
  imfdiag::SplitMix64 rng(19);
  for (int c = 0; c < 2; ++c) {
    auto v = oracles::sine(c == 0 ? 400.0 : 1500.0, 40000.0, 600);
    for (double& s : v) s += 0.25 * (rng.next_unit() - 0.5);
    write_csv_channel(tmp.path / (std::string(c ? "d" : "h") + ".csv"), v);
  }
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "h.csv,AN3,healthy\nd.csv,AN4,damaged\n";
  }
  const std::string cache = (tmp.path / "cache").string();
  REQUIRE(run_cli("preprocess --manifest " +
                  (tmp.path / "manifest.csv").string() +
                  " --window-len 100 --windows-per-record 6 --seed 5 "
                  "--nr 2 --cache-dir " + cache) == 0);
  // An absurd learning rate overflows the parameters within an epoch.
  CHECK(run_cli("train --cache-dir " + cache +
                " --train-frac 0.5 --val-frac 0.25 --lr 1e300 "
                "--max-epochs 3 --patience 3 --seed 5 --checkpoint " +
                (tmp.path / "m.bin").string()) == 3);
}

TEST_CASE("cli: duration sweep writes its reports") {
  TempDir tmp;
  imfdiag::SplitMix64 rng(23);
  for (int c = 0; c < 2; ++c) {
    auto v = oracles::sine(c == 0 ? 600.0 : 2200.0, 40000.0, 480);
    for (double& s : v) s += 0.2 * (rng.next_unit() - 0.5);
    write_csv_channel(tmp.path / (std::string(c ? "d" : "h") + ".csv"), v);
  }
  {
    std::ofstream out(tmp.path / "manifest.csv");
    out << "h.csv,AN3,healthy\nd.csv,AN4,damaged\n";
  }
  const std::string report = (tmp.path / "sweep").string();
  CHECK(run_cli("sweep duration --manifest " +
                (tmp.path / "manifest.csv").string() +
                " --durations 0.003,0.0025 --windows-per-record 4 "
                "--train-frac 0.5 --val-frac 0.25 --lr 1e-3 --max-epochs 2 "
                "--patience 2 --seed 3 --report " + report) == 0);
  REQUIRE(fs::exists(fs::path(report) / "duration_sweep.csv"));
  CHECK(fs::exists(fs::path(report) / "sweep.svg"));
  // Both comma-separated durations produced a row.
  std::ifstream in(fs::path(report) / "duration_sweep.csv");
  std::string line;
  int rows = 0;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}
