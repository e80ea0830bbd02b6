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

#ifndef IMFDIAG_SIGNAL_HPP_
#define IMFDIAG_SIGNAL_HPP_

#include <span>
#include <vector>

namespace imfdiag {

// One channel of uniformly sampled vibration data.
struct Signal {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
};

// Throws InvalidArgument when samples are empty/non-finite or the rate is
// not positive.
void validate_signal(const Signal& s);

// Controls the sifting loop. The Cauchy-type SD threshold of 0.2 is the
// classical default; the hard cap keeps pathological inputs bounded.
struct SiftConfig {
  double sd_threshold = 0.2;
  int max_sifts_per_imf = 50;
  int min_extrema = 4;
  int max_total_imfs = 16;
};

void validate_sift_config(const SiftConfig& cfg);

struct Extrema {
  std::vector<int> maxima;
  std::vector<int> minima;
  int total() const {
    return static_cast<int>(maxima.size() + minima.size());
  }
};

// Strictly interior extrema. A plateau (run of equal samples) counts once,
// at the run's midpoint, and only when the signal strictly rises into the
// run and strictly falls out of it (mirrored for minima).
Extrema find_extrema(std::span<const double> x);

enum class EnvelopeSide { upper, lower };

// Natural cubic spline through the extrema, extended past the signal ends
// by mirroring the two nearest extrema across each endpoint. With fewer
// than three extrema the envelope degrades to a straight line (or a
// constant for a single extremum).
std::vector<double> envelope(std::span<const double> x,
                             std::span<const int> extrema_indices,
                             EnvelopeSide side);

// Natural cubic spline interpolation: fit to (knot_x, knot_y) and evaluate
// at t = 0, 1, ..., n_eval-1. knot_x must be strictly increasing and span
// the evaluation range.
std::vector<double> natural_cubic_spline(std::span<const double> knot_x,
                                         std::span<const double> knot_y,
                                         int n_eval);

struct SiftResult {
  std::vector<double> imf;
  int sift_count = 0;
};

// Repeats h <- h - mean(upper_env, lower_env) until
// SD = sum((h_prev - h)^2) / sum(h_prev^2) drops below cfg.sd_threshold or
// the iteration cap binds. Requires at least cfg.min_extrema interior
// extrema on entry.
SiftResult sift(const Signal& signal, const SiftConfig& cfg);
SiftResult sift(std::span<const double> x, const SiftConfig& cfg);

struct EmdResult {
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;
};

// Plain empirical mode decomposition. Extraction stops once the running
// residual has fewer than cfg.min_extrema extrema or cfg.max_total_imfs is
// reached. sum(imfs) + residual telescopes back to the input.
EmdResult emd(const Signal& signal, const SiftConfig& cfg);

// Counts strict sign changes; zero samples take the sign of the previous
// nonzero sample.
int zero_crossings(std::span<const double> x);

// Population (1/n) standard deviation.
double population_std(std::span<const double> x);

}  // namespace imfdiag

#endif  // IMFDIAG_SIGNAL_HPP_
