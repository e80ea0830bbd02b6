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

#include "signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "errors.hpp"

namespace imfdiag {

void validate_signal(const Signal& s) {
  if (s.samples.empty()) throw InvalidArgument("signal: samples are empty");
  if (!(s.sample_rate_hz > 0.0))
    throw InvalidArgument("signal: sample rate must be positive");
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (!std::isfinite(s.samples[i]))
      throw InvalidArgument("signal: non-finite sample at index " +
                            std::to_string(i));
  }
}

void validate_sift_config(const SiftConfig& cfg) {
  if (!(cfg.sd_threshold > 0.0))
    throw InvalidArgument("sift config: sd_threshold must be > 0");
  if (cfg.max_sifts_per_imf < 1)
    throw InvalidArgument("sift config: max_sifts_per_imf must be >= 1");
  if (cfg.min_extrema < 1)
    throw InvalidArgument("sift config: min_extrema must be >= 1");
  if (cfg.max_total_imfs < 1)
    throw InvalidArgument("sift config: max_total_imfs must be >= 1");
}

double population_std(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

Extrema find_extrema(std::span<const double> x) {
  Extrema out;
  const std::size_t n = x.size();
  if (n < 3) return out;

  // Walk maximal runs of equal samples; a run is an extremum when the
  // signal strictly rises into it and strictly falls out (or vice versa).
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    while (e + 1 < n && x[e + 1] == x[s]) ++e;
    if (s >= 1 && e <= n - 2) {
      const std::size_t mid = (s + e) / 2;
      if (x[s - 1] < x[s] && x[e] > x[e + 1]) {
        out.maxima.push_back(static_cast<int>(mid));
      } else if (x[s - 1] > x[s] && x[e] < x[e + 1]) {
        out.minima.push_back(static_cast<int>(mid));
      }
    }
    s = e + 1;
  }
  return out;
}

std::vector<double> natural_cubic_spline(std::span<const double> knot_x,
                                         std::span<const double> knot_y,
                                         int n_eval) {
  const std::size_t m = knot_x.size();
  if (m != knot_y.size() || m < 2)
    throw InvalidArgument("spline: need >= 2 knots with matching values");
  for (std::size_t i = 1; i < m; ++i) {
    if (!(knot_x[i] > knot_x[i - 1]))
      throw InvalidArgument("spline: knot abscissae must strictly increase");
  }

  // Second derivatives M_i, natural boundary (M_0 = M_{m-1} = 0), via the
  // Thomas algorithm on the standard tridiagonal system.
  std::vector<double> m2(m, 0.0);
  if (m > 2) {
    const std::size_t k = m - 2;  // interior unknowns
    std::vector<double> diag(k), rhs(k), sub(k), sup(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double h0 = knot_x[i + 1] - knot_x[i];
      const double h1 = knot_x[i + 2] - knot_x[i + 1];
      sub[i] = h0;
      diag[i] = 2.0 * (h0 + h1);
      sup[i] = h1;
      rhs[i] = 6.0 * ((knot_y[i + 2] - knot_y[i + 1]) / h1 -
                      (knot_y[i + 1] - knot_y[i]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m2[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) {
      m2[i + 1] = (rhs[i] - sup[i] * m2[i + 2]) / diag[i];
    }
  }

  std::vector<double> out(static_cast<std::size_t>(n_eval));
  std::size_t seg = 0;
  for (int t = 0; t < n_eval; ++t) {
    const double xt = static_cast<double>(t);
    while (seg + 2 < m && xt > knot_x[seg + 1]) ++seg;
    const double h = knot_x[seg + 1] - knot_x[seg];
    const double a = (knot_x[seg + 1] - xt) / h;
    const double b = (xt - knot_x[seg]) / h;
    out[static_cast<std::size_t>(t)] =
        a * knot_y[seg] + b * knot_y[seg + 1] +
        ((a * a * a - a) * m2[seg] + (b * b * b - b) * m2[seg + 1]) *
            (h * h) / 6.0;
  }
  return out;
}

std::vector<double> envelope(std::span<const double> x,
                             std::span<const int> idx, EnvelopeSide side) {
  (void)side;  // upper and lower envelopes share the construction
  const std::size_t n = x.size();
  if (idx.empty()) throw InvalidArgument("envelope: no extrema supplied");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= n)
      throw InvalidArgument("envelope: extremum index out of range");
    if (i > 0 && idx[i] <= idx[i - 1])
      throw InvalidArgument("envelope: indices must strictly increase");
  }

  const std::size_t m = idx.size();
  if (m == 1) {
    return std::vector<double>(n, x[static_cast<std::size_t>(idx[0])]);
  }
  if (m == 2) {
    // Straight line through the two extrema, extended to the signal ends.
    const double x0 = idx[0], x1 = idx[1];
    const double y0 = x[static_cast<std::size_t>(idx[0])];
    const double y1 = x[static_cast<std::size_t>(idx[1])];
    const double slope = (y1 - y0) / (x1 - x0);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t)
      out[t] = y0 + slope * (static_cast<double>(t) - x0);
    return out;
  }

  // Mirror the two extrema nearest to each endpoint across that endpoint so
  // the spline is anchored beyond both ends of the evaluation range.
  const double right = static_cast<double>(n - 1);
  std::vector<double> kx, ky;
  kx.reserve(m + 4);
  ky.reserve(m + 4);
  auto push = [&](double px, double py) {
    if (!kx.empty() && !(px > kx.back())) return;  // drop degenerate mirrors
    kx.push_back(px);
    ky.push_back(py);
  };
  push(-static_cast<double>(idx[1]), x[static_cast<std::size_t>(idx[1])]);
  push(-static_cast<double>(idx[0]), x[static_cast<std::size_t>(idx[0])]);
  for (std::size_t i = 0; i < m; ++i)
    push(static_cast<double>(idx[i]), x[static_cast<std::size_t>(idx[i])]);
  push(2.0 * right - static_cast<double>(idx[m - 1]),
       x[static_cast<std::size_t>(idx[m - 1])]);
  push(2.0 * right - static_cast<double>(idx[m - 2]),
       x[static_cast<std::size_t>(idx[m - 2])]);

  return natural_cubic_spline(kx, ky, static_cast<int>(n));
}

SiftResult sift(std::span<const double> x, const SiftConfig& cfg) {
  validate_sift_config(cfg);
  {
    const Extrema e = find_extrema(x);
    if (e.total() < cfg.min_extrema)
      throw InvalidArgument("sift: fewer than min_extrema interior extrema");
  }

  std::vector<double> h(x.begin(), x.end());
  std::vector<double> h_next(h.size());
  int count = 0;
  while (count < cfg.max_sifts_per_imf) {
    const Extrema e = find_extrema(h);
    if (e.maxima.empty() || e.minima.empty()) {
      if (count == 0)
        throw InvalidArgument("sift: envelopes need extrema on both sides");
      break;
    }
    const std::vector<double> upper =
        envelope(h, e.maxima, EnvelopeSide::upper);
    const std::vector<double> lower =
        envelope(h, e.minima, EnvelopeSide::lower);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double mean = 0.5 * (upper[i] + lower[i]);
      h_next[i] = h[i] - mean;
      num += mean * mean;
      den += h[i] * h[i];
    }
    h.swap(h_next);
    ++count;
    const double sd = den > 0.0 ? num / den : 0.0;
    if (sd < cfg.sd_threshold) break;
  }
  return {std::move(h), count};
}

SiftResult sift(const Signal& signal, const SiftConfig& cfg) {
  validate_signal(signal);
  return sift(std::span<const double>(signal.samples), cfg);
}

EmdResult emd(const Signal& signal, const SiftConfig& cfg) {
  validate_signal(signal);
  validate_sift_config(cfg);

  EmdResult out;
  out.residual = signal.samples;
  while (static_cast<int>(out.imfs.size()) < cfg.max_total_imfs) {
    const Extrema e = find_extrema(out.residual);
    if (e.total() < cfg.min_extrema) break;
    SiftResult r = sift(std::span<const double>(out.residual), cfg);
    for (std::size_t i = 0; i < out.residual.size(); ++i)
      out.residual[i] -= r.imf[i];
    out.imfs.push_back(std::move(r.imf));
  }
  return out;
}

int zero_crossings(std::span<const double> x) {
  int count = 0;
  int last = 0;
  for (double v : x) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace imfdiag
