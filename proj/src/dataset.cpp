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

#include "dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace imfdiag {

namespace {

constexpr char kF64Magic[4] = {'V', 'I', 'B', '1'};

bool has_f64_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::memcmp(magic, kF64Magic, 4) == 0;
}

Signal load_csv(const std::string& path, double sample_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  Signal s;
  s.sample_rate_hz = sample_rate_hz;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const char* begin = line.data();
    const char* end = begin + line.size();
    const auto [next, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || next != end)
      throw DataError(path + ": parse error at line " +
                      std::to_string(line_no));
    if (!std::isfinite(v))
      throw DataError(path + ": non-finite sample at index " +
                      std::to_string(s.samples.size()));
    s.samples.push_back(v);
  }
  if (s.samples.empty()) throw DataError(path + ": no samples");
  return s;
}

Signal load_f64le(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[4] = {};
  std::uint32_t rate = 0, count = 0, reserved = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rate), 4);
  in.read(reinterpret_cast<char*>(&count), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  if (!in || std::memcmp(magic, kF64Magic, 4) != 0)
    throw DataError(path + ": bad f64le header");
  Signal s;
  s.sample_rate_hz = static_cast<double>(rate);
  s.samples.resize(count);
  in.read(reinterpret_cast<char*>(s.samples.data()),
          static_cast<std::streamsize>(sizeof(double) * count));
  if (static_cast<std::uint32_t>(in.gcount() / sizeof(double)) != count)
    throw DataError(path + ": truncated f64le payload");
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (!std::isfinite(s.samples[i]))
      throw DataError(path + ": non-finite sample at index " +
                      std::to_string(i));
  }
  if (s.samples.empty()) throw DataError(path + ": no samples");
  return s;
}

std::string sanitize_stem(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  for (char& c : stem) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '-';
  }
  return stem.empty() ? std::string("record") : stem;
}

}  // namespace

Signal load_channel(const std::string& path, FileFormat format,
                    double csv_sample_rate_hz) {
  if (format == FileFormat::auto_detect)
    format = has_f64_magic(path) ? FileFormat::f64le : FileFormat::csv;
  return format == FileFormat::f64le ? load_f64le(path)
                                     : load_csv(path, csv_sample_rate_hz);
}

void write_channel_f64le(const Signal& s, const std::string& path) {
  validate_signal(s);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  const std::uint32_t rate =
      static_cast<std::uint32_t>(std::llround(s.sample_rate_hz));
  const std::uint32_t count = static_cast<std::uint32_t>(s.samples.size());
  const std::uint32_t reserved = 0;
  std::fwrite(kF64Magic, 1, 4, f);
  std::fwrite(&rate, 4, 1, f);
  std::fwrite(&count, 4, 1, f);
  std::fwrite(&reserved, 4, 1, f);
  std::fwrite(s.samples.data(), sizeof(double), s.samples.size(), f);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

void write_channel_csv(const Signal& s, const std::string& path) {
  validate_signal(s);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  for (double v : s.samples) std::fprintf(f, "%.17g\n", v);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

std::vector<RawRecord> load_manifest(const std::string& manifest_path,
                                     double csv_sample_rate_hz) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest: " + manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();

  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::istringstream ls(line);
    std::string path, channel, condition;
    if (!std::getline(ls, path, ',') || !std::getline(ls, channel, ',') ||
        !std::getline(ls, condition))
      throw DataError(manifest_path + ": expected path,channel,condition at "
                      "line " + std::to_string(line_no));

    RawRecord rec;
    rec.channel_id = channel;
    if (condition == "healthy") rec.condition = Condition::healthy;
    else if (condition == "damaged") rec.condition = Condition::damaged;
    else
      throw DataError(manifest_path + ": unknown condition '" + condition +
                      "' at line " + std::to_string(line_no));

    fs::path p(path);
    if (p.is_relative()) p = base / p;
    rec.source_path = p.string();
    rec.signal =
        load_channel(rec.source_path, FileFormat::auto_detect,
                     csv_sample_rate_hz);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError(manifest_path + ": no records");
  return records;
}

std::vector<std::vector<double>> window(const Signal& signal, int window_len,
                                        int count) {
  validate_signal(signal);
  if (window_len < 1 || count < 1)
    throw InvalidArgument("window: window_len and count must be >= 1");
  if (signal.samples.size() <
      static_cast<std::size_t>(window_len) * static_cast<std::size_t>(count))
    throw InvalidArgument("window: signal shorter than window_len * count");

  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) {
    const auto begin =
        signal.samples.begin() + static_cast<std::ptrdiff_t>(w) * window_len;
    out.emplace_back(begin, begin + window_len);
  }
  return out;
}

WindowedDataset build_dataset(const std::vector<RawRecord>& records,
                              int window_len, int windows_per_record,
                              std::uint64_t seed) {
  if (records.empty()) throw InvalidArgument("build_dataset: no records");

  WindowedDataset ds;
  ds.window_len = window_len;
  ds.sample_rate_hz = records.front().signal.sample_rate_hz;
  for (const RawRecord& rec : records) {
    std::vector<std::vector<double>> wins;
    try {
      wins = window(rec.signal, window_len, windows_per_record);
    } catch (const Error& e) {
      throw InvalidArgument(rec.source_path + " (" + rec.channel_id +
                            "): " + e.what());
    }
    const std::string stem = sanitize_stem(rec.source_path);
    for (int w = 0; w < windows_per_record; ++w) {
      ds.windows.push_back(std::move(wins[static_cast<std::size_t>(w)]));
      ds.labels.push_back(static_cast<int>(rec.condition));
      ds.provenance.push_back({stem, rec.channel_id, w});
    }
  }

  // Seeded Fisher-Yates over samples, labels and provenance in lockstep.
  SplitMix64 rng(derive_stream(seed, 0xDA7A5E7));
  for (std::size_t i = ds.size() - 1; i > 0; --i) {
    const std::size_t j = rng.next_below(i + 1);
    std::swap(ds.windows[i], ds.windows[j]);
    std::swap(ds.labels[i], ds.labels[j]);
    std::swap(ds.provenance[i], ds.provenance[j]);
  }
  return ds;
}

namespace {

WindowedDataset slice(const WindowedDataset& ds, std::size_t begin,
                      std::size_t end) {
  WindowedDataset out;
  out.window_len = ds.window_len;
  out.sample_rate_hz = ds.sample_rate_hz;
  out.decomposed = ds.decomposed;
  for (std::size_t i = begin; i < end; ++i) {
    if (ds.decomposed) out.imfsets.push_back(ds.imfsets[i]);
    else out.windows.push_back(ds.windows[i]);
    out.labels.push_back(ds.labels[i]);
    out.provenance.push_back(ds.provenance[i]);
  }
  return out;
}

}  // namespace

SplitResult split(const WindowedDataset& ds, double train_frac,
                  double val_frac, std::uint64_t seed) {
  (void)seed;
  if (!(train_frac > 0.0 && train_frac < 1.0) ||
      !(val_frac > 0.0 && val_frac < 1.0))
    throw InvalidArgument("split: fractions must lie in (0,1)");
  if (!(train_frac + val_frac < 1.0))
    throw InvalidArgument("split: train_frac + val_frac must be < 1");

  // floor(n * frac), except that products within rounding error of an
  // integer count as that integer (1400 * 0.7 must be 980, not 979).
  auto floor_frac = [](std::size_t n, double frac) {
    const double v = static_cast<double>(n) * frac;
    const double r = std::round(v);
    return static_cast<std::size_t>(std::fabs(v - r) < 1e-6 ? r
                                                            : std::floor(v));
  };
  const std::size_t n = ds.size();
  const std::size_t n_train = floor_frac(n, train_frac);
  const std::size_t n_val = floor_frac(n, val_frac);
  const std::size_t n_test = n - n_train - n_val;
  if (n_train == 0 || n_val == 0 || n_test == 0)
    throw InvalidArgument("split: a partition would be empty");

  SplitResult out;
  out.train = slice(ds, 0, n_train);
  out.val = slice(ds, n_train, n_train + n_val);
  out.test = slice(ds, n_train + n_val, n);
  return out;
}

WindowedDataset decompose_all(const WindowedDataset& ds,
                              const CeemdanConfig& cfg,
                              const SiftConfig& sift_cfg, int n_threads) {
  if (ds.decomposed)
    throw InvalidArgument("decompose_all: dataset already decomposed");
  if (ds.size() == 0) throw InvalidArgument("decompose_all: empty dataset");
  validate_ceemdan_config(cfg);
  validate_sift_config(sift_cfg);

  WindowedDataset out;
  out.window_len = ds.window_len;
  out.sample_rate_hz = ds.sample_rate_hz;
  out.decomposed = true;
  out.labels = ds.labels;
  out.provenance = ds.provenance;
  out.imfsets.resize(ds.size());

  auto run_one = [&](std::size_t i) {
    const SampleProvenance& p = ds.provenance[i];
    CeemdanConfig wcfg = cfg;
    wcfg.seed = derive_stream(cfg.seed, fnv1a64(p.file + "|" + p.channel),
                              static_cast<std::uint64_t>(p.window_index));
    Signal w{ds.windows[i], ds.sample_rate_hz};
    try {
      out.imfsets[i] = ceemdan(w, wcfg, sift_cfg);
    } catch (const Error& e) {
      throw Error(e.code(), p.file + "/" + p.channel + " window " +
                                std::to_string(p.window_index) + ": " +
                                e.what());
    }
  };

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < ds.size(); ++i) run_one(i);
  } else {
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= ds.size()) return;
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return out;
}

void write_cache(const WindowedDataset& ds, const std::string& dir) {
  if (!ds.decomposed) throw InvalidArgument("write_cache: not decomposed");
  fs::create_directories(dir);

  std::ofstream index(fs::path(dir) / "index.csv", std::ios::binary);
  if (!index) throw IoError("cannot write cache index in " + dir);
  index << "# window_len=" << ds.window_len
        << " sample_rate=" << ds.sample_rate_hz << " n=" << ds.size() << "\n";
  index << "filename,label,file,channel,window_index\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const SampleProvenance& p = ds.provenance[i];
    const std::string name = p.file + "_" + p.channel + "_" +
                             std::to_string(p.window_index) + "_" +
                             std::to_string(ds.labels[i]) + ".csv";
    write_imfset_csv(ds.imfsets[i], (fs::path(dir) / name).string());
    index << name << ',' << ds.labels[i] << ',' << p.file << ',' << p.channel
          << ',' << p.window_index << "\n";
  }
  if (!index) throw IoError("cache index write failed in " + dir);
}

WindowedDataset read_cache(const std::string& dir) {
  const fs::path index_path = fs::path(dir) / "index.csv";
  std::ifstream index(index_path, std::ios::binary);
  if (!index) throw IoError("cannot open cache index: " + index_path.string());

  WindowedDataset ds;
  ds.decomposed = true;

  std::string line;
  if (!std::getline(index, line) || line.empty() || line[0] != '#')
    throw DataError(index_path.string() + ": missing cache header");
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "window_len") ds.window_len = std::stoi(val);
      else if (key == "sample_rate") ds.sample_rate_hz = std::stod(val);
    }
  }
  std::getline(index, line);  // column header

  while (std::getline(index, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, label, file, channel, widx;
    if (!std::getline(ls, name, ',') || !std::getline(ls, label, ',') ||
        !std::getline(ls, file, ',') || !std::getline(ls, channel, ',') ||
        !std::getline(ls, widx))
      throw DataError(index_path.string() + ": malformed index row");
    ds.imfsets.push_back(read_imfset_csv((fs::path(dir) / name).string()));
    ds.labels.push_back(std::stoi(label));
    ds.provenance.push_back({file, channel, std::stoi(widx)});
  }
  if (ds.size() == 0) throw DataError(dir + ": cache is empty");
  if (ds.window_len == 0)
    ds.window_len = static_cast<int>(ds.imfsets.front().source_length());
  return ds;
}

}  // namespace imfdiag
