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

#include "sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "metrics.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace imfdiag {

namespace {

std::string sanitize_note(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

ModelSpec spec_for(int window_len) {
  ModelSpec spec;
  spec.input_len = window_len;
  return spec;
}

// Best validation accuracy of one decompose/split/train run.
double run_param_cell(const std::vector<RawRecord>& records,
                      const SweepSettings& st, const ParamCell& cell) {
  CeemdanConfig ccfg = st.ceemdan;
  ccfg.nr = cell.nr;
  ccfg.max_iter = cell.max_iter;
  ccfg.snr_flag = cell.snr_flag;
  ccfg.seed = derive_stream(st.seed, 2);

  WindowedDataset ds = build_dataset(records, st.window_len,
                                     st.windows_per_record,
                                     derive_stream(st.seed, 1));
  SplitResult parts = split(ds, st.train_frac, st.val_frac);
  WindowedDataset train =
      decompose_all(parts.train, ccfg, st.sift, st.threads);
  WindowedDataset val = decompose_all(parts.val, ccfg, st.sift, st.threads);

  TrainConfig tcfg = st.train;
  tcfg.seed = derive_stream(st.seed, 3);
  const FitResult fitted = fit(train, val, spec_for(st.window_len), tcfg);

  double best = 0.0;
  for (const EpochStats& e : fitted.history.epochs)
    best = std::max(best, e.val_acc);
  return best;
}

Metrics run_duration_cell(const std::vector<RawRecord>& records,
                          const SweepSettings& st, int window_len) {
  CeemdanConfig ccfg = st.ceemdan;
  ccfg.seed = derive_stream(st.seed, 2);

  WindowedDataset ds = build_dataset(records, window_len,
                                     st.windows_per_record,
                                     derive_stream(st.seed, 1));
  SplitResult parts = split(ds, st.train_frac, st.val_frac);
  WindowedDataset train =
      decompose_all(parts.train, ccfg, st.sift, st.threads);
  WindowedDataset val = decompose_all(parts.val, ccfg, st.sift, st.threads);
  WindowedDataset test = decompose_all(parts.test, ccfg, st.sift, st.threads);

  TrainConfig tcfg = st.train;
  tcfg.seed = derive_stream(st.seed, 3);
  const FitResult fitted = fit(train, val, spec_for(window_len), tcfg);

  const PredictResult pred = predict(fitted.params, test);
  std::vector<double> secs;
  for (const EpochStats& e : fitted.history.epochs) secs.push_back(e.seconds);
  std::sort(secs.begin(), secs.end());
  TimingInfo timing;
  timing.train_seconds_per_epoch = secs.empty() ? 0.0 : secs[secs.size() / 2];
  timing.test_ms_per_sample = pred.ms_per_sample;
  return compute_metrics(pred.labels, test.labels, timing);
}

}  // namespace

std::vector<ParamCell> default_param_grid() {
  return {
      {25, 250, 1}, {50, 250, 1}, {75, 250, 1}, {100, 250, 1},
      {50, 100, 1}, {50, 250, 1}, {50, 500, 1}, {50, 250, 0},
  };
}

std::vector<ParamCell> read_param_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid: " + path);
  std::vector<ParamCell> grid;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (first && line.find("nr") != std::string::npos) {
      first = false;
      continue;  // header
    }
    first = false;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
        !std::getline(ls, c))
      throw DataError(path + ": expected nr,max_iter,snr_flag rows");
    ParamCell cell;
    cell.nr = static_cast<std::uint32_t>(std::stoul(a));
    cell.max_iter = static_cast<std::uint32_t>(std::stoul(b));
    cell.snr_flag = std::stoi(c);
    grid.push_back(cell);
  }
  if (grid.empty()) throw DataError(path + ": empty grid");
  return grid;
}

namespace {

void write_param_csv(const std::vector<ParamResult>& rows,
                     const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "nr,max_iter,snr_flag,val_accuracy,status\n");
  for (const ParamResult& r : rows) {
    if (r.ok)
      std::fprintf(f, "%u,%u,%d,%.17g,ok\n", r.cell.nr, r.cell.max_iter,
                   r.cell.snr_flag, r.val_accuracy);
    else
      std::fprintf(f, "%u,%u,%d,,%s\n", r.cell.nr, r.cell.max_iter,
                   r.cell.snr_flag, sanitize_note(r.error).c_str());
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

std::vector<ParamResult> read_param_csv(const std::string& path) {
  std::vector<ParamResult> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string nr, mi, fl, acc, status;
    if (!std::getline(ls, nr, ',') || !std::getline(ls, mi, ',') ||
        !std::getline(ls, fl, ',') || !std::getline(ls, acc, ','))
      continue;
    std::getline(ls, status);
    ParamResult r;
    r.cell.nr = static_cast<std::uint32_t>(std::stoul(nr));
    r.cell.max_iter = static_cast<std::uint32_t>(std::stoul(mi));
    r.cell.snr_flag = std::stoi(fl);
    r.ok = status == "ok";
    if (r.ok) r.val_accuracy = std::stod(acc);
    else r.error = status;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_param_svg(const std::vector<ParamResult>& rows,
                     const std::string& path) {
  Series acc{"val accuracy", {}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    acc.x.push_back(static_cast<double>(i + 1));
    acc.y.push_back(rows[i].val_accuracy);
  }
  if (acc.x.empty()) return;
  write_line_svg(path, "Validation accuracy per tuning cell", "grid row",
                 "validation accuracy", {acc});
}

}  // namespace

std::vector<ParamResult> param_sweep(const std::string& manifest_path,
                                     const std::vector<ParamCell>& grid,
                                     const SweepSettings& settings,
                                     const std::string& report_dir) {
  fs::create_directories(report_dir);
  const std::string csv_path =
      (fs::path(report_dir) / "param_sweep.csv").string();
  std::vector<ParamResult> rows = read_param_csv(csv_path);
  auto completed = [&](const ParamCell& c) {
    return std::any_of(rows.begin(), rows.end(), [&](const ParamResult& r) {
      return r.ok && r.cell.nr == c.nr && r.cell.max_iter == c.max_iter &&
             r.cell.snr_flag == c.snr_flag;
    });
  };

  const std::vector<RawRecord> records =
      load_manifest(manifest_path, settings.csv_sample_rate_hz);

  for (const ParamCell& cell : grid) {
    if (completed(cell)) continue;
    ParamResult r;
    r.cell = cell;
    try {
      r.val_accuracy = run_param_cell(records, settings, cell);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
    write_param_csv(rows, csv_path);
    write_param_svg(rows, (fs::path(report_dir) / "sweep.svg").string());
  }
  return rows;
}

namespace {

void write_duration_csv(const std::vector<DurationResult>& rows,
                        const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "duration_s,accuracy,f1,status\n");
  for (const DurationResult& r : rows) {
    if (r.ok)
      std::fprintf(f, "%.17g,%.17g,%.17g,ok\n", r.duration_s, r.accuracy,
                   r.f1);
    else
      std::fprintf(f, "%.17g,,,%s\n", r.duration_s,
                   sanitize_note(r.error).c_str());
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

std::vector<DurationResult> read_duration_csv(const std::string& path) {
  std::vector<DurationResult> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string dur, acc, f1, status;
    if (!std::getline(ls, dur, ',') || !std::getline(ls, acc, ',') ||
        !std::getline(ls, f1, ','))
      continue;
    std::getline(ls, status);
    DurationResult r;
    r.duration_s = std::stod(dur);
    r.ok = status == "ok";
    if (r.ok) {
      r.accuracy = std::stod(acc);
      r.f1 = std::stod(f1);
    } else {
      r.error = status;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_duration_svg(const std::vector<DurationResult>& rows,
                        const std::string& path) {
  Series acc{"accuracy", {}, {}}, f1{"F1", {}, {}};
  for (const DurationResult& r : rows) {
    if (!r.ok) continue;
    acc.x.push_back(r.duration_s);
    acc.y.push_back(r.accuracy);
    f1.x.push_back(r.duration_s);
    f1.y.push_back(r.f1);
  }
  if (acc.x.empty()) return;
  write_line_svg(path, "Performance vs. signal duration", "duration (s)",
                 "score", {acc, f1});
}

}  // namespace

std::vector<DurationResult> duration_sweep(const std::string& manifest_path,
                                           const std::vector<double>& durations,
                                           const SweepSettings& settings,
                                           const std::string& report_dir) {
  fs::create_directories(report_dir);
  const std::string csv_path =
      (fs::path(report_dir) / "duration_sweep.csv").string();
  std::vector<DurationResult> rows = read_duration_csv(csv_path);
  auto completed = [&](double d) {
    return std::any_of(rows.begin(), rows.end(), [&](const DurationResult& r) {
      return r.ok && std::fabs(r.duration_s - d) < 1e-12;
    });
  };

  const std::vector<RawRecord> records =
      load_manifest(manifest_path, settings.csv_sample_rate_hz);
  const double rate = records.front().signal.sample_rate_hz;

  for (double d : durations) {
    if (completed(d)) continue;
    DurationResult r;
    r.duration_s = d;
    try {
      const double len = d * rate;
      const double rounded = std::round(len);
      if (std::fabs(len - rounded) > 1e-6)
        throw InvalidArgument("duration does not map to a whole sample count");
      const int window_len = static_cast<int>(rounded);
      if (window_len < 24)
        throw InvalidArgument("duration shorter than 24 samples");
      const Metrics m = run_duration_cell(records, settings, window_len);
      r.accuracy = m.accuracy;
      r.f1 = m.f1;
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
    write_duration_csv(rows, csv_path);
    write_duration_svg(rows, (fs::path(report_dir) / "sweep.svg").string());
  }
  return rows;
}

}  // namespace imfdiag
