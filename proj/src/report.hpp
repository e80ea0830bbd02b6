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

#ifndef IMFDIAG_REPORT_HPP_
#define IMFDIAG_REPORT_HPP_

#include <string>
#include <vector>

#include "metrics.hpp"
#include "mscnn.hpp"

namespace imfdiag {

// CSVs are written with 17 significant digits so a parse-back reproduces
// the in-memory doubles bit-exactly.
void write_metrics_csv(const Metrics& m, const std::string& path);
Metrics read_metrics_csv(const std::string& path);

void write_history_csv(const TrainHistory& h, const std::string& path);
TrainHistory read_history_csv(const std::string& path);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Self-contained static SVG line plot with axes, tick labels and a legend.
void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series);

// Writes metrics.csv when metrics is non-null, history.csv + loss.svg when
// the history has epochs. An empty history omits loss.svg.
void report(const TrainHistory* history, const Metrics* metrics,
            const std::string& out_dir);

}  // namespace imfdiag

#endif  // IMFDIAG_REPORT_HPP_
