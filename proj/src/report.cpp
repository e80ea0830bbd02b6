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

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace fs = std::filesystem;

namespace imfdiag {

namespace {

std::FILE* open_write(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  return f;
}

void close_checked(std::FILE* f, const std::string& path) {
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace

void write_metrics_csv(const Metrics& m, const std::string& path) {
  std::FILE* f = open_write(path);
  std::fprintf(f, "tp,fp,tn,fn,accuracy,precision,recall,f1,"
               "train_seconds_per_epoch,test_ms_per_sample\n");
  std::fprintf(f, "%llu,%llu,%llu,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
               static_cast<unsigned long long>(m.tp),
               static_cast<unsigned long long>(m.fp),
               static_cast<unsigned long long>(m.tn),
               static_cast<unsigned long long>(m.fn), m.accuracy, m.precision,
               m.recall, m.f1, m.train_seconds_per_epoch,
               m.test_ms_per_sample);
  close_checked(f, path);
}

Metrics read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw DataError(path + ": expected header and one row");
  std::istringstream rs(row);
  std::string tok;
  std::vector<std::string> cols;
  while (std::getline(rs, tok, ',')) cols.push_back(tok);
  if (cols.size() != 10) throw DataError(path + ": expected 10 columns");
  Metrics m;
  m.tp = std::stoull(cols[0]);
  m.fp = std::stoull(cols[1]);
  m.tn = std::stoull(cols[2]);
  m.fn = std::stoull(cols[3]);
  m.accuracy = std::stod(cols[4]);
  m.precision = std::stod(cols[5]);
  m.recall = std::stod(cols[6]);
  m.f1 = std::stod(cols[7]);
  m.train_seconds_per_epoch = std::stod(cols[8]);
  m.test_ms_per_sample = std::stod(cols[9]);
  return m;
}

void write_history_csv(const TrainHistory& h, const std::string& path) {
  std::FILE* f = open_write(path);
  std::fprintf(f, "epoch,train_loss,val_loss,val_acc,seconds\n");
  for (const EpochStats& e : h.epochs)
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss,
                 e.val_loss, e.val_acc, e.seconds);
  close_checked(f, path);
}

TrainHistory read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty history");
  TrainHistory h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(tok);
    if (cols.size() != 5) throw DataError(path + ": expected 5 columns");
    h.epochs.push_back({std::stoi(cols[0]), std::stod(cols[1]),
                        std::stod(cols[2]), std::stod(cols[3]),
                        std::stod(cols[4])});
  }
  double best = std::numeric_limits<double>::infinity();
  for (const EpochStats& e : h.epochs) {
    if (e.val_loss < best) {
      best = e.val_loss;
      h.best_epoch = e.epoch;
    }
  }
  return h;
}

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series) {
  constexpr int kW = 720, kH = 440;
  constexpr int kLeft = 70, kRight = 30, kTop = 50, kBottom = 55;
  constexpr int kPlotW = kW - kLeft - kRight;
  constexpr int kPlotH = kH - kTop - kBottom;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * kPlotW;
  };
  auto py = [&](double y) {
    return kTop + kPlotH - (y - ymin) / (ymax - ymin) * kPlotH;
  };

  std::FILE* f = open_write(path);
  std::fprintf(f,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
               "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
               kW, kH, kW, kH);
  std::fprintf(f, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", kW,
               kH);
  std::fprintf(f,
               "<text x=\"%d\" y=\"25\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
               kW / 2, title.c_str());

  // Axes.
  std::fprintf(f,
               "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
               "stroke=\"black\"/>\n",
               kLeft, kTop + kPlotH, kLeft + kPlotW, kTop + kPlotH);
  std::fprintf(f,
               "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
               "stroke=\"black\"/>\n",
               kLeft, kTop, kLeft, kTop + kPlotH);

  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    const double xp = px(xv), yp = py(yv);
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" "
                 "stroke=\"black\"/>\n",
                 xp, kTop + kPlotH, xp, kTop + kPlotH + 5);
    std::fprintf(f,
                 "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                 "font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n",
                 xp, kTop + kPlotH + 20, xv);
    std::fprintf(f,
                 "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" "
                 "stroke=\"black\"/>\n",
                 kLeft - 5, yp, kLeft, yp);
    std::fprintf(f,
                 "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                 "font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n",
                 kLeft - 9, yp + 4, yv);
  }

  std::fprintf(f,
               "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"13\">%s</text>\n",
               kLeft + kPlotW / 2, kH - 12, x_label.c_str());
  std::fprintf(f,
               "<text x=\"18\" y=\"%d\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 18 %d)\">%s</text>\n",
               kTop + kPlotH / 2, kTop + kPlotH / 2, y_label.c_str());

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 4];
    std::string points;
    char buf[64];
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(series[s].x[i]),
                    py(series[s].y[i]));
      points += buf;
    }
    std::fprintf(f,
                 "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" "
                 "points=\"%s\"/>\n",
                 color, points.c_str());
    // Legend entry.
    const int ly = kTop + 8 + static_cast<int>(s) * 18;
    std::fprintf(f,
                 "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                 "stroke=\"%s\" stroke-width=\"2\"/>\n",
                 kLeft + kPlotW - 130, ly, kLeft + kPlotW - 105, ly, color);
    std::fprintf(f,
                 "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                 "font-size=\"12\">%s</text>\n",
                 kLeft + kPlotW - 100, ly + 4, series[s].label.c_str());
  }
  std::fprintf(f, "</svg>\n");
  close_checked(f, path);
}

void report(const TrainHistory* history, const Metrics* metrics,
            const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (metrics)
    write_metrics_csv(*metrics, (fs::path(out_dir) / "metrics.csv").string());
  if (history && !history->epochs.empty()) {
    write_history_csv(*history,
                      (fs::path(out_dir) / "history.csv").string());
    Series train{"train loss", {}, {}}, val{"val loss", {}, {}};
    for (const EpochStats& e : history->epochs) {
      train.x.push_back(static_cast<double>(e.epoch));
      train.y.push_back(e.train_loss);
      val.x.push_back(static_cast<double>(e.epoch));
      val.y.push_back(e.val_loss);
    }
    write_line_svg((fs::path(out_dir) / "loss.svg").string(),
                   "Training and validation loss", "epoch", "loss",
                   {train, val});
  }
}

}  // namespace imfdiag
