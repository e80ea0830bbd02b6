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

// imfdiag command-line front end. All the work happens behind the C API in
// libimfdiag; this file only parses flags and maps statuses to exit codes:
// 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imfdiag/imfdiag.h"

namespace {

int exit_code(imfdiag_status status) {
  switch (status) {
    case IMFDIAG_OK:
      return 0;
    case IMFDIAG_ERR_INVALID:
      return 1;
    case IMFDIAG_ERR_NUMERIC:
      return 3;
    case IMFDIAG_ERR_DATA:
    case IMFDIAG_ERR_IO:
    default:
      return 2;
  }
}

int finish(imfdiag_status status) {
  if (status != IMFDIAG_OK)
    std::fprintf(stderr, "error: %s\n", imfdiag_last_error());
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CEEMDAN + multiscale-CNN vibration fault diagnosis toolkit"};
  app.require_subcommand(1);

  imfdiag_ceemdan_options ceemdan;
  imfdiag_ceemdan_options_init(&ceemdan);
  imfdiag_train_options train_opts;
  imfdiag_train_options_init(&train_opts);

  // --- decompose ---------------------------------------------------------
  auto* decompose = app.add_subcommand(
      "decompose", "Decompose one channel file into an IMF-set CSV");
  std::string dec_input, dec_format = "csv", dec_output;
  double dec_rate = 40000.0;
  decompose->add_option("--input", dec_input, "channel file")->required();
  decompose->add_option("--format", dec_format, "csv or f64le")
      ->check(CLI::IsMember({"csv", "f64le", "auto"}));
  decompose->add_option("--sample-rate", dec_rate, "CSV sample rate (Hz)");
  decompose->add_option("--nr", ceemdan.nr, "ensemble realizations");
  decompose->add_option("--max-iter", ceemdan.max_iter, "total sift budget");
  decompose->add_option("--snr-flag", ceemdan.snr_flag,
                        "1 adaptive noise, 0 fixed");
  decompose->add_option("--epsilon", ceemdan.epsilon, "noise coefficient");
  decompose->add_option("--k", ceemdan.k, "IMF count");
  decompose->add_option("--seed", ceemdan.seed, "RNG seed");
  decompose->add_option("--output", dec_output, "output CSV")->required();

  // --- preprocess --------------------------------------------------------
  auto* preprocess = app.add_subcommand(
      "preprocess", "Window, label, shuffle and decompose a manifest into a "
                    "cache directory");
  std::string pre_manifest, pre_cache;
  std::uint32_t pre_window = 20000, pre_wpr = 10, pre_threads = 1;
  std::uint64_t pre_seed = 42;
  double pre_rate = 40000.0;
  preprocess->add_option("--manifest", pre_manifest, "dataset manifest")
      ->required();
  preprocess->add_option("--window-len", pre_window, "samples per window");
  preprocess->add_option("--windows-per-record", pre_wpr,
                         "windows taken per record");
  preprocess->add_option("--seed", pre_seed, "RNG seed");
  preprocess->add_option("--cache-dir", pre_cache, "output cache directory")
      ->required();
  preprocess->add_option("--sample-rate", pre_rate, "CSV sample rate (Hz)");
  preprocess->add_option("--nr", ceemdan.nr, "ensemble realizations");
  preprocess->add_option("--max-iter", ceemdan.max_iter, "total sift budget");
  preprocess->add_option("--snr-flag", ceemdan.snr_flag,
                         "1 adaptive noise, 0 fixed");
  preprocess->add_option("--epsilon", ceemdan.epsilon, "noise coefficient");
  preprocess->add_option("--k", ceemdan.k, "IMF count");
  preprocess->add_option("--threads", pre_threads, "decomposition threads");

  // --- train -------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train the classifier on a cache");
  std::string tr_cache, tr_checkpoint, tr_report;
  train->add_option("--cache-dir", tr_cache, "decomposed cache")->required();
  train->add_option("--train-frac", train_opts.train_frac, "train fraction");
  train->add_option("--val-frac", train_opts.val_frac, "validation fraction");
  train->add_option("--lr", train_opts.lr, "Adam learning rate");
  train->add_option("--batch-size", train_opts.batch_size, "minibatch size");
  train->add_option("--max-epochs", train_opts.max_epochs, "epoch cap");
  train->add_option("--patience", train_opts.patience,
                    "early-stopping patience (epochs)");
  train->add_option("--seed", train_opts.seed, "RNG seed");
  train->add_option("--checkpoint", tr_checkpoint, "output checkpoint")
      ->required();
  train->add_option("--report", tr_report, "report directory");

  // --- evaluate ----------------------------------------------------------
  auto* evaluate =
      app.add_subcommand("evaluate", "Evaluate a checkpoint on a cache");
  std::string ev_cache, ev_checkpoint, ev_report, ev_split = "test";
  evaluate->add_option("--cache-dir", ev_cache, "decomposed cache")
      ->required();
  evaluate->add_option("--checkpoint", ev_checkpoint, "model checkpoint")
      ->required();
  evaluate->add_option("--report", ev_report, "report directory");
  evaluate->add_option("--train-frac", train_opts.train_frac,
                       "train fraction used at training time");
  evaluate->add_option("--val-frac", train_opts.val_frac,
                       "validation fraction used at training time");
  evaluate->add_option("--seed", train_opts.seed, "RNG seed");
  evaluate->add_option("--split", ev_split, "partition to score")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));

  // --- sweep -------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep");
  sweep->require_subcommand(1);

  imfdiag_sweep_options sweep_opts;
  imfdiag_sweep_options_init(&sweep_opts);
  std::string sw_manifest, sw_report, sw_grid;
  std::vector<double> sw_durations;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", sw_manifest, "dataset manifest")->required();
    cmd->add_option("--report", sw_report, "report directory")->required();
    cmd->add_option("--window-len", sweep_opts.window_len,
                    "samples per window");
    cmd->add_option("--windows-per-record", sweep_opts.windows_per_record,
                    "windows taken per record");
    cmd->add_option("--sample-rate", sweep_opts.csv_sample_rate_hz,
                    "CSV sample rate (Hz)");
    cmd->add_option("--train-frac", sweep_opts.train.train_frac,
                    "train fraction");
    cmd->add_option("--val-frac", sweep_opts.train.val_frac,
                    "validation fraction");
    cmd->add_option("--lr", sweep_opts.train.lr, "Adam learning rate");
    cmd->add_option("--batch-size", sweep_opts.train.batch_size,
                    "minibatch size");
    cmd->add_option("--max-epochs", sweep_opts.train.max_epochs, "epoch cap");
    cmd->add_option("--patience", sweep_opts.train.patience,
                    "early-stopping patience");
    cmd->add_option("--epsilon", sweep_opts.ceemdan.epsilon,
                    "noise coefficient");
    cmd->add_option("--seed", sweep_opts.seed, "master RNG seed");
    cmd->add_option("--threads", sweep_opts.threads, "decomposition threads");
  };

  auto* sweep_params = sweep->add_subcommand(
      "params", "CEEMDAN parameter grid vs. validation accuracy");
  sweep_params->add_option("--grid", sw_grid,
                           "grid CSV (nr,max_iter,snr_flag); omit for the "
                           "standard eight-cell grid");
  add_common(sweep_params);

  auto* sweep_duration = sweep->add_subcommand(
      "duration", "window duration vs. accuracy and F1");
  sweep_duration
      ->add_option("--durations", sw_durations, "window durations in seconds")
      ->required()
      ->delimiter(',');
  add_common(sweep_duration);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (decompose->parsed()) {
    imfdiag_signal* sig = nullptr;
    imfdiag_status st =
        imfdiag_signal_load(dec_input.c_str(), dec_format.c_str(), dec_rate,
                            &sig);
    if (st != IMFDIAG_OK) return finish(st);
    imfdiag_imfset* set = nullptr;
    st = imfdiag_ceemdan_run(sig, &ceemdan, &set);
    imfdiag_signal_free(sig);
    if (st != IMFDIAG_OK) return finish(st);
    st = imfdiag_imfset_write_csv(set, dec_output.c_str());
    const auto n_samples =
        static_cast<unsigned long long>(imfdiag_imfset_length(set));
    imfdiag_imfset_free(set);
    if (st == IMFDIAG_OK)
      std::printf("wrote %s (%u IMFs + residual, %llu samples)\n",
                  dec_output.c_str(), ceemdan.k, n_samples);
    return finish(st);
  }

  if (preprocess->parsed()) {
    const imfdiag_status st = imfdiag_preprocess(
        pre_manifest.c_str(), pre_window, pre_wpr, pre_seed, &ceemdan,
        pre_rate, pre_threads, pre_cache.c_str());
    if (st == IMFDIAG_OK)
      std::printf("cache written to %s\n", pre_cache.c_str());
    return finish(st);
  }

  if (train->parsed()) {
    double best_val_loss = 0.0;
    std::uint32_t epochs = 0;
    const imfdiag_status st = imfdiag_train(
        tr_cache.c_str(), &train_opts, tr_checkpoint.c_str(),
        tr_report.empty() ? nullptr : tr_report.c_str(), &best_val_loss,
        &epochs);
    if (st == IMFDIAG_OK)
      std::printf("trained %u epochs, best val loss %.6g, checkpoint %s\n",
                  epochs, best_val_loss, tr_checkpoint.c_str());
    return finish(st);
  }

  if (evaluate->parsed()) {
    imfdiag_metrics m{};
    const imfdiag_status st = imfdiag_evaluate(
        ev_cache.c_str(), ev_checkpoint.c_str(), &train_opts,
        ev_split.c_str(), ev_report.empty() ? nullptr : ev_report.c_str(),
        &m);
    if (st == IMFDIAG_OK) {
      std::printf("split=%s n=%llu\n", ev_split.c_str(),
                  static_cast<unsigned long long>(m.tp + m.fp + m.tn + m.fn));
      std::printf("confusion tp=%llu fp=%llu tn=%llu fn=%llu\n",
                  static_cast<unsigned long long>(m.tp),
                  static_cast<unsigned long long>(m.fp),
                  static_cast<unsigned long long>(m.tn),
                  static_cast<unsigned long long>(m.fn));
      std::printf("accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f\n",
                  m.accuracy, m.precision, m.recall, m.f1);
      std::printf("test_ms_per_sample=%.4f train_s_per_epoch=%.4f\n",
                  m.test_ms_per_sample, m.train_seconds_per_epoch);
    }
    return finish(st);
  }

  if (sweep_params->parsed()) {
    const imfdiag_status st = imfdiag_sweep_params(
        sw_manifest.c_str(), sw_grid.empty() ? nullptr : sw_grid.c_str(),
        &sweep_opts, sw_report.c_str());
    if (st == IMFDIAG_OK)
      std::printf("param sweep results in %s\n", sw_report.c_str());
    return finish(st);
  }

  if (sweep_duration->parsed()) {
    const imfdiag_status st = imfdiag_sweep_duration(
        sw_manifest.c_str(), sw_durations.data(), sw_durations.size(),
        &sweep_opts, sw_report.c_str());
    if (st == IMFDIAG_OK)
      std::printf("duration sweep results in %s\n", sw_report.c_str());
    return finish(st);
  }

  return 1;
}
