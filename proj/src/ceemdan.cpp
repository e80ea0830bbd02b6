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

#include "ceemdan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace imfdiag {

void validate_ceemdan_config(const CeemdanConfig& cfg) {
  if (cfg.nr < 1) throw InvalidArgument("ceemdan config: nr must be >= 1");
  if (cfg.max_iter < 1)
    throw InvalidArgument("ceemdan config: max_iter must be >= 1");
  if (cfg.k < 1) throw InvalidArgument("ceemdan config: k must be >= 1");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw InvalidArgument("ceemdan config: epsilon must be positive");
  if (cfg.snr_flag != 0 && cfg.snr_flag != 1)
    throw InvalidArgument("ceemdan config: snr_flag must be 0 or 1");
}

namespace {

// First IMF of the mixture, or all zeros when there is too little
// oscillation to sift.
std::vector<double> first_imf_or_zero(const std::vector<double>& mix,
                                      const SiftConfig& cfg) {
  const Extrema e = find_extrema(mix);
  if (e.total() < cfg.min_extrema)
    return std::vector<double>(mix.size(), 0.0);
  return sift(std::span<const double>(mix), cfg).imf;
}

}  // namespace

IMFSet ceemdan(const Signal& signal, const CeemdanConfig& cfg,
               const SiftConfig& sift_cfg) {
  validate_signal(signal);
  validate_ceemdan_config(cfg);
  validate_sift_config(sift_cfg);
  if (signal.samples.size() < 100)
    throw InvalidArgument("ceemdan: signal must have at least 100 samples");

  const std::size_t n = signal.samples.size();
  const std::vector<double>& x = signal.samples;

  // max_iter is the total sift budget for the decomposition, so each of the
  // k stages gets an equal share of it (never less than one sift).
  SiftConfig scfg = sift_cfg;
  scfg.max_sifts_per_imf =
      std::min(sift_cfg.max_sifts_per_imf,
               std::max(1, static_cast<int>(cfg.max_iter / cfg.k)));

  const double std_x = population_std(x);

  std::vector<double> residual = x;
  std::vector<double> imf_sum(n, 0.0);  // running sum of extracted IMFs
  std::vector<std::vector<double>> imfs;
  imfs.reserve(cfg.k);

  for (std::uint32_t stage = 1; stage <= cfg.k; ++stage) {
    const Extrema e = find_extrema(residual);
    if (e.total() < scfg.min_extrema) break;  // rest is zero-filled below

    const double basis = cfg.snr_flag ? population_std(residual) : std_x;
    const double eps_eff = cfg.epsilon * basis;

    std::vector<double> avg(n, 0.0);
    std::vector<double> mix(n);
    for (std::uint32_t r = 1; r <= cfg.nr; ++r) {
      // Stage 1 reduces to x + noise since imf_sum is still zero.
      if (eps_eff > 0.0) {
        const std::vector<double> noise =
            gaussian_noise(n, eps_eff, derive_stream(cfg.seed, stage, r));
        for (std::size_t i = 0; i < n; ++i)
          mix[i] = residual[i] + eps_eff * imf_sum[i] + noise[i];
      } else {
        for (std::size_t i = 0; i < n; ++i) mix[i] = residual[i];
      }
      const std::vector<double> imf = first_imf_or_zero(mix, scfg);
      for (std::size_t i = 0; i < n; ++i) avg[i] += imf[i];
    }
    const double inv_nr = 1.0 / static_cast<double>(cfg.nr);
    for (std::size_t i = 0; i < n; ++i) {
      avg[i] *= inv_nr;
      residual[i] -= avg[i];
      imf_sum[i] += avg[i];
    }
    imfs.push_back(std::move(avg));
  }

  while (imfs.size() < cfg.k) imfs.emplace_back(n, 0.0);

  IMFSet out;
  out.imfs = std::move(imfs);
  out.residual = std::move(residual);
  out.seed = cfg.seed;
  out.nr = cfg.nr;
  out.max_iter = cfg.max_iter;
  out.snr_flag = cfg.snr_flag;
  out.epsilon = cfg.epsilon;
  return out;
}

std::vector<double> reconstruct(const IMFSet& set) {
  std::vector<double> out = set.residual;
  for (const auto& imf : set.imfs) {
    if (imf.size() != out.size())
      throw InvalidArgument("reconstruct: ragged IMF rows");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += imf[i];
  }
  return out;
}

namespace {

void write_row(std::FILE* f, const std::vector<double>& row) {
  char buf[40];
  for (std::size_t i = 0; i < row.size(); ++i) {
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
    if (i) std::fputc(',', f);
    std::fwrite(buf, 1, static_cast<std::size_t>(len), f);
  }
  std::fputc('\n', f);
}

std::vector<double> parse_row(const std::string& line,
                              const std::string& path) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    double v = 0.0;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc())
      throw DataError(path + ": malformed number in IMF row");
    row.push_back(v);
    p = next;
    if (p < end) {
      if (*p != ',') throw DataError(path + ": expected comma in IMF row");
      ++p;
    }
  }
  return row;
}

}  // namespace

void write_imfset_csv(const IMFSet& set, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "# k=%d len=%zu seed=%llu nr=%u max_iter=%u snr_flag=%d "
               "epsilon=%.17g\n",
               set.k(), set.source_length(),
               static_cast<unsigned long long>(set.seed), set.nr,
               set.max_iter, set.snr_flag, set.epsilon);
  for (const auto& imf : set.imfs) write_row(f, imf);
  write_row(f, set.residual);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

IMFSet read_imfset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  std::string header;
  if (!std::getline(in, header) || header.empty() || header[0] != '#')
    throw DataError(path + ": missing IMF set header");

  IMFSet set;
  int k = 0;
  std::size_t len = 0;
  {
    std::istringstream hs(header.substr(1));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "k") k = std::stoi(val);
      else if (key == "len") len = std::stoull(val);
      else if (key == "seed") set.seed = std::stoull(val);
      else if (key == "nr") set.nr = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "max_iter")
        set.max_iter = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "snr_flag") set.snr_flag = std::stoi(val);
      else if (key == "epsilon") set.epsilon = std::stod(val);
    }
  }
  if (k < 1 || len < 1) throw DataError(path + ": bad IMF set header");

  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line, path));
    if (rows.back().size() != len)
      throw DataError(path + ": row length disagrees with header");
  }
  if (rows.size() != static_cast<std::size_t>(k) + 1)
    throw DataError(path + ": expected k+1 rows");

  set.residual = std::move(rows.back());
  rows.pop_back();
  set.imfs = std::move(rows);
  return set;
}

}  // namespace imfdiag
