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

#include "metrics.hpp"

#include "errors.hpp"

namespace imfdiag {

Metrics compute_metrics(std::span<const int> predicted,
                        std::span<const int> actual, TimingInfo timing) {
  if (predicted.size() != actual.size())
    throw InvalidArgument("compute_metrics: length mismatch");
  if (predicted.empty())
    throw InvalidArgument("compute_metrics: empty input");

  Metrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int a = actual[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1))
      throw InvalidArgument("compute_metrics: labels must be 0 or 1");
    if (p == 1 && a == 1) ++m.tp;
    else if (p == 1 && a == 0) ++m.fp;
    else if (p == 0 && a == 0) ++m.tn;
    else ++m.fn;
  }

  const double n = static_cast<double>(predicted.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / n;
  m.precision = (m.tp + m.fp) > 0
                    ? static_cast<double>(m.tp) /
                          static_cast<double>(m.tp + m.fp)
                    : 0.0;
  m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) /
                                     static_cast<double>(m.tp + m.fn)
                               : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.train_seconds_per_epoch = timing.train_seconds_per_epoch;
  m.test_ms_per_sample = timing.test_ms_per_sample;
  return m;
}

}  // namespace imfdiag
