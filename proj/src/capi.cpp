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

#include "imfdiag/imfdiag.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ceemdan.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "pipeline.hpp"
#include "signal.hpp"
#include "sweeps.hpp"

namespace {

thread_local std::string g_last_error;

imfdiag_status map_code(imfdiag::ErrorCode code) {
  switch (code) {
    case imfdiag::ErrorCode::invalid_argument:
      return IMFDIAG_ERR_INVALID;
    case imfdiag::ErrorCode::data:
      return IMFDIAG_ERR_DATA;
    case imfdiag::ErrorCode::numeric:
      return IMFDIAG_ERR_NUMERIC;
    case imfdiag::ErrorCode::io:
      return IMFDIAG_ERR_IO;
  }
  return IMFDIAG_ERR_DATA;
}

template <typename F>
imfdiag_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return IMFDIAG_OK;
  } catch (const imfdiag::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IMFDIAG_ERR_DATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IMFDIAG_ERR_DATA;
  }
}

imfdiag_status fail_invalid(const char* msg) noexcept {
  g_last_error = msg;
  return IMFDIAG_ERR_INVALID;
}

imfdiag::CeemdanConfig to_config(const imfdiag_ceemdan_options& o) {
  imfdiag::CeemdanConfig cfg;
  cfg.nr = o.nr;
  cfg.max_iter = o.max_iter;
  cfg.snr_flag = static_cast<int>(o.snr_flag);
  cfg.epsilon = o.epsilon;
  cfg.k = o.k;
  cfg.seed = o.seed;
  return cfg;
}

imfdiag::TrainPipelineOptions to_pipeline(const imfdiag_train_options& o) {
  imfdiag::TrainPipelineOptions p;
  p.train_frac = o.train_frac;
  p.val_frac = o.val_frac;
  p.train.lr = o.lr;
  p.train.batch_size = static_cast<int>(o.batch_size);
  p.train.max_epochs = static_cast<int>(o.max_epochs);
  p.train.patience = static_cast<int>(o.patience);
  p.train.seed = o.seed;
  return p;
}

imfdiag::SweepSettings to_settings(const imfdiag_sweep_options& o) {
  imfdiag::SweepSettings st;
  st.window_len = static_cast<int>(o.window_len);
  st.windows_per_record = static_cast<int>(o.windows_per_record);
  st.ceemdan = to_config(o.ceemdan);
  const imfdiag::TrainPipelineOptions p = to_pipeline(o.train);
  st.train = p.train;
  st.train_frac = p.train_frac;
  st.val_frac = p.val_frac;
  st.csv_sample_rate_hz = o.csv_sample_rate_hz;
  st.threads = static_cast<int>(o.threads);
  st.seed = o.seed;
  return st;
}

}  // namespace

struct imfdiag_signal {
  imfdiag::Signal value;
};

struct imfdiag_imfset {
  imfdiag::IMFSet value;
};

extern "C" {

const char* imfdiag_version(void) { return "1.0.0"; }

const char* imfdiag_last_error(void) { return g_last_error.c_str(); }

imfdiag_status imfdiag_signal_create(const double* samples, uint64_t n,
                                     double sample_rate_hz,
                                     imfdiag_signal** out) {
  if (!samples || !out) return fail_invalid("signal_create: null argument");
  return guarded([&] {
    auto s = std::make_unique<imfdiag_signal>();
    s->value.samples.assign(samples, samples + n);
    s->value.sample_rate_hz = sample_rate_hz;
    imfdiag::validate_signal(s->value);
    *out = s.release();
  });
}

imfdiag_status imfdiag_signal_load(const char* path, const char* format,
                                   double csv_sample_rate_hz,
                                   imfdiag_signal** out) {
  if (!path || !format || !out)
    return fail_invalid("signal_load: null argument");
  return guarded([&] {
    imfdiag::FileFormat fmt;
    if (std::strcmp(format, "csv") == 0) fmt = imfdiag::FileFormat::csv;
    else if (std::strcmp(format, "f64le") == 0)
      fmt = imfdiag::FileFormat::f64le;
    else if (std::strcmp(format, "auto") == 0)
      fmt = imfdiag::FileFormat::auto_detect;
    else
      throw imfdiag::InvalidArgument(std::string("unknown format: ") + format);
    auto s = std::make_unique<imfdiag_signal>();
    s->value = imfdiag::load_channel(path, fmt, csv_sample_rate_hz);
    *out = s.release();
  });
}

uint64_t imfdiag_signal_length(const imfdiag_signal* s) {
  return s ? s->value.samples.size() : 0;
}

double imfdiag_signal_rate(const imfdiag_signal* s) {
  return s ? s->value.sample_rate_hz : 0.0;
}

const double* imfdiag_signal_samples(const imfdiag_signal* s) {
  return s ? s->value.samples.data() : nullptr;
}

void imfdiag_signal_free(imfdiag_signal* s) { delete s; }

void imfdiag_ceemdan_options_init(imfdiag_ceemdan_options* opts) {
  if (!opts) return;
  opts->nr = 50;
  opts->max_iter = 250;
  opts->snr_flag = 1;
  opts->epsilon = 0.2;
  opts->k = 10;
  opts->seed = 42;
}

imfdiag_status imfdiag_ceemdan_run(const imfdiag_signal* signal,
                                   const imfdiag_ceemdan_options* opts,
                                   imfdiag_imfset** out) {
  if (!signal || !opts || !out)
    return fail_invalid("ceemdan_run: null argument");
  return guarded([&] {
    auto set = std::make_unique<imfdiag_imfset>();
    set->value =
        imfdiag::ceemdan(signal->value, to_config(*opts), imfdiag::SiftConfig{});
    *out = set.release();
  });
}

uint32_t imfdiag_imfset_k(const imfdiag_imfset* set) {
  return set ? static_cast<uint32_t>(set->value.k()) : 0;
}

uint64_t imfdiag_imfset_length(const imfdiag_imfset* set) {
  return set ? set->value.source_length() : 0;
}

const double* imfdiag_imfset_imf(const imfdiag_imfset* set, uint32_t i) {
  if (!set || i >= set->value.imfs.size()) return nullptr;
  return set->value.imfs[i].data();
}

const double* imfdiag_imfset_residual(const imfdiag_imfset* set) {
  return set ? set->value.residual.data() : nullptr;
}

imfdiag_status imfdiag_imfset_write_csv(const imfdiag_imfset* set,
                                        const char* path) {
  if (!set || !path) return fail_invalid("imfset_write_csv: null argument");
  return guarded([&] { imfdiag::write_imfset_csv(set->value, path); });
}

imfdiag_status imfdiag_imfset_read_csv(const char* path,
                                       imfdiag_imfset** out) {
  if (!path || !out) return fail_invalid("imfset_read_csv: null argument");
  return guarded([&] {
    auto set = std::make_unique<imfdiag_imfset>();
    set->value = imfdiag::read_imfset_csv(path);
    *out = set.release();
  });
}

void imfdiag_imfset_free(imfdiag_imfset* set) { delete set; }

void imfdiag_train_options_init(imfdiag_train_options* opts) {
  if (!opts) return;
  opts->train_frac = 0.7;
  opts->val_frac = 0.1;
  opts->lr = 1e-5;
  opts->batch_size = 16;
  opts->max_epochs = 100;
  opts->patience = 15;
  opts->seed = 42;
}

imfdiag_status imfdiag_preprocess(const char* manifest_path,
                                  uint32_t window_len,
                                  uint32_t windows_per_record, uint64_t seed,
                                  const imfdiag_ceemdan_options* ceemdan,
                                  double csv_sample_rate_hz, uint32_t threads,
                                  const char* cache_dir) {
  if (!manifest_path || !ceemdan || !cache_dir)
    return fail_invalid("preprocess: null argument");
  return guarded([&] {
    imfdiag::PreprocessOptions opts;
    opts.window_len = static_cast<int>(window_len);
    opts.windows_per_record = static_cast<int>(windows_per_record);
    opts.seed = seed;
    opts.ceemdan = to_config(*ceemdan);
    opts.csv_sample_rate_hz = csv_sample_rate_hz;
    opts.threads = static_cast<int>(threads);
    imfdiag::preprocess(manifest_path, opts, cache_dir);
  });
}

imfdiag_status imfdiag_train(const char* cache_dir,
                             const imfdiag_train_options* opts,
                             const char* checkpoint_path,
                             const char* report_dir, double* best_val_loss,
                             uint32_t* epochs_run) {
  if (!cache_dir || !opts || !checkpoint_path)
    return fail_invalid("train: null argument");
  return guarded([&] {
    const imfdiag::TrainOutcome outcome = imfdiag::train_pipeline(
        cache_dir, to_pipeline(*opts), checkpoint_path,
        report_dir ? report_dir : "");
    if (epochs_run)
      *epochs_run = static_cast<uint32_t>(outcome.history.epochs.size());
    if (best_val_loss) {
      double best = 0.0;
      for (const imfdiag::EpochStats& e : outcome.history.epochs)
        if (e.epoch == outcome.history.best_epoch) best = e.val_loss;
      *best_val_loss = best;
    }
  });
}

imfdiag_status imfdiag_evaluate(const char* cache_dir,
                                const char* checkpoint_path,
                                const imfdiag_train_options* opts,
                                const char* split_part,
                                const char* report_dir, imfdiag_metrics* out) {
  if (!cache_dir || !checkpoint_path || !opts || !split_part)
    return fail_invalid("evaluate: null argument");
  return guarded([&] {
    const imfdiag::Metrics m = imfdiag::evaluate_pipeline(
        cache_dir, checkpoint_path, to_pipeline(*opts),
        imfdiag::parse_split_part(split_part), report_dir ? report_dir : "");
    if (out) {
      out->tp = m.tp;
      out->fp = m.fp;
      out->tn = m.tn;
      out->fn = m.fn;
      out->accuracy = m.accuracy;
      out->precision = m.precision;
      out->recall = m.recall;
      out->f1 = m.f1;
      out->train_seconds_per_epoch = m.train_seconds_per_epoch;
      out->test_ms_per_sample = m.test_ms_per_sample;
    }
  });
}

void imfdiag_sweep_options_init(imfdiag_sweep_options* opts) {
  if (!opts) return;
  opts->window_len = 20000;
  opts->windows_per_record = 10;
  imfdiag_ceemdan_options_init(&opts->ceemdan);
  imfdiag_train_options_init(&opts->train);
  opts->csv_sample_rate_hz = 40000.0;
  opts->threads = 1;
  opts->seed = 42;
}

imfdiag_status imfdiag_sweep_params(const char* manifest_path,
                                    const char* grid_csv,
                                    const imfdiag_sweep_options* opts,
                                    const char* report_dir) {
  if (!manifest_path || !opts || !report_dir)
    return fail_invalid("sweep_params: null argument");
  return guarded([&] {
    const std::vector<imfdiag::ParamCell> grid =
        grid_csv ? imfdiag::read_param_grid_csv(grid_csv)
                 : imfdiag::default_param_grid();
    imfdiag::param_sweep(manifest_path, grid, to_settings(*opts), report_dir);
  });
}

imfdiag_status imfdiag_sweep_duration(const char* manifest_path,
                                      const double* durations,
                                      uint64_t n_durations,
                                      const imfdiag_sweep_options* opts,
                                      const char* report_dir) {
  if (!manifest_path || !durations || !opts || !report_dir)
    return fail_invalid("sweep_duration: null argument");
  if (n_durations == 0) return fail_invalid("sweep_duration: no durations");
  return guarded([&] {
    const std::vector<double> d(durations, durations + n_durations);
    imfdiag::duration_sweep(manifest_path, d, to_settings(*opts), report_dir);
  });
}

}  // extern "C"
