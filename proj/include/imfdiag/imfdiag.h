/* Copyright 2026  imfdiag authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
 * WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
 * MERCHANTABLITY OR NON-INFRINGEMENT.
 * See the Apache 2 License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the imfdiag toolkit: CEEMDAN decomposition of vibration
 * signals and the multiscale CNN fault classifier built on top of it.
 *
 * Conventions:
 *  - every fallible call returns an imfdiag_status; on failure
 *    imfdiag_last_error() describes what went wrong (thread-local);
 *  - objects are opaque handles created and released by this library;
 *  - pointers returned by accessors stay valid until the owning handle is
 *    freed and must not be freed by the caller.
 */

#ifndef IMFDIAG_H_
#define IMFDIAG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IMFDIAG_API __declspec(dllexport)
#else
#define IMFDIAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imfdiag_status {
  IMFDIAG_OK = 0,
  IMFDIAG_ERR_INVALID = 1, /* bad arguments or configuration */
  IMFDIAG_ERR_DATA = 2,    /* parse/shape/content failure */
  IMFDIAG_ERR_NUMERIC = 3, /* non-finite loss or similar numeric failure */
  IMFDIAG_ERR_IO = 4       /* filesystem failure */
} imfdiag_status;

IMFDIAG_API const char* imfdiag_version(void);

/* Message for the most recent failure on this thread; empty string if the
 * last call succeeded. */
IMFDIAG_API const char* imfdiag_last_error(void);

/* ------------------------------------------------------------------------
 * Signals
 * ---------------------------------------------------------------------- */

typedef struct imfdiag_signal imfdiag_signal;

IMFDIAG_API imfdiag_status imfdiag_signal_create(const double* samples,
                                                 uint64_t n,
                                                 double sample_rate_hz,
                                                 imfdiag_signal** out);

/* format: "csv" (one value per line, rate from csv_sample_rate_hz),
 * "f64le" (binary: magic "VIB1", u32 rate, u32 count, u32 reserved, then
 * little-endian doubles) or "auto" to sniff the magic. */
IMFDIAG_API imfdiag_status imfdiag_signal_load(const char* path,
                                               const char* format,
                                               double csv_sample_rate_hz,
                                               imfdiag_signal** out);

IMFDIAG_API uint64_t imfdiag_signal_length(const imfdiag_signal* s);
IMFDIAG_API double imfdiag_signal_rate(const imfdiag_signal* s);
IMFDIAG_API const double* imfdiag_signal_samples(const imfdiag_signal* s);
IMFDIAG_API void imfdiag_signal_free(imfdiag_signal* s);

/* ------------------------------------------------------------------------
 * CEEMDAN decomposition
 * ---------------------------------------------------------------------- */

typedef struct imfdiag_ceemdan_options {
  uint32_t nr;       /* ensemble realizations (default 50) */
  uint32_t max_iter; /* total sift budget (default 250) */
  int32_t snr_flag;  /* 1: adaptive noise amplitude (default), 0: fixed */
  double epsilon;    /* noise amplitude coefficient (default 0.2) */
  uint32_t k;        /* IMF rows, fixed at 10 for the standard model */
  uint64_t seed;
} imfdiag_ceemdan_options;

IMFDIAG_API void imfdiag_ceemdan_options_init(imfdiag_ceemdan_options* opts);

typedef struct imfdiag_imfset imfdiag_imfset;

IMFDIAG_API imfdiag_status imfdiag_ceemdan_run(
    const imfdiag_signal* signal, const imfdiag_ceemdan_options* opts,
    imfdiag_imfset** out);

IMFDIAG_API uint32_t imfdiag_imfset_k(const imfdiag_imfset* set);
IMFDIAG_API uint64_t imfdiag_imfset_length(const imfdiag_imfset* set);
/* Row i in [0, k). */
IMFDIAG_API const double* imfdiag_imfset_imf(const imfdiag_imfset* set,
                                             uint32_t i);
IMFDIAG_API const double* imfdiag_imfset_residual(const imfdiag_imfset* set);
IMFDIAG_API imfdiag_status imfdiag_imfset_write_csv(const imfdiag_imfset* set,
                                                    const char* path);
IMFDIAG_API imfdiag_status imfdiag_imfset_read_csv(const char* path,
                                                   imfdiag_imfset** out);
IMFDIAG_API void imfdiag_imfset_free(imfdiag_imfset* set);

/* ------------------------------------------------------------------------
 * Pipelines
 * ---------------------------------------------------------------------- */

typedef struct imfdiag_train_options {
  double train_frac; /* default 0.7 */
  double val_frac;   /* default 0.1 */
  double lr;         /* default 1e-5 */
  uint32_t batch_size; /* default 16 */
  uint32_t max_epochs; /* default 100 */
  uint32_t patience;   /* default 15 */
  uint64_t seed;
} imfdiag_train_options;

IMFDIAG_API void imfdiag_train_options_init(imfdiag_train_options* opts);

typedef struct imfdiag_metrics {
  uint64_t tp, fp, tn, fn;
  double accuracy, precision, recall, f1;
  double train_seconds_per_epoch;
  double test_ms_per_sample;
} imfdiag_metrics;

/* Manifest ("path,channel,healthy|damaged" per line) -> windowed, labeled,
 * shuffled, CEEMDAN-decomposed cache directory. */
IMFDIAG_API imfdiag_status imfdiag_preprocess(
    const char* manifest_path, uint32_t window_len,
    uint32_t windows_per_record, uint64_t seed,
    const imfdiag_ceemdan_options* ceemdan, double csv_sample_rate_hz,
    uint32_t threads, const char* cache_dir);

/* Cache -> trained checkpoint; history.csv and loss.svg land in report_dir
 * (pass NULL to skip reports). best_val_loss/epochs_run may be NULL. */
IMFDIAG_API imfdiag_status imfdiag_train(const char* cache_dir,
                                         const imfdiag_train_options* opts,
                                         const char* checkpoint_path,
                                         const char* report_dir,
                                         double* best_val_loss,
                                         uint32_t* epochs_run);

/* Cache + checkpoint -> metrics over one partition ("train", "val", "test"
 * or "all"); metrics.csv lands in report_dir (NULL to skip). */
IMFDIAG_API imfdiag_status imfdiag_evaluate(const char* cache_dir,
                                            const char* checkpoint_path,
                                            const imfdiag_train_options* opts,
                                            const char* split_part,
                                            const char* report_dir,
                                            imfdiag_metrics* out);

typedef struct imfdiag_sweep_options {
  uint32_t window_len;         /* default 20000 */
  uint32_t windows_per_record; /* default 10 */
  imfdiag_ceemdan_options ceemdan;
  imfdiag_train_options train;
  double csv_sample_rate_hz; /* default 40000 */
  uint32_t threads;          /* default 1 */
  uint64_t seed;             /* master seed for the sweep */
} imfdiag_sweep_options;

IMFDIAG_API void imfdiag_sweep_options_init(imfdiag_sweep_options* opts);

/* CEEMDAN parameter tuning sweep. grid_csv may be NULL to run the standard
 * eight-cell grid; results accumulate in report_dir/param_sweep.csv and
 * completed cells are skipped on re-runs. */
IMFDIAG_API imfdiag_status imfdiag_sweep_params(
    const char* manifest_path, const char* grid_csv,
    const imfdiag_sweep_options* opts, const char* report_dir);

/* Window-duration sweep (seconds); retrains per duration and evaluates on
 * the held-out test split. */
IMFDIAG_API imfdiag_status imfdiag_sweep_duration(
    const char* manifest_path, const double* durations, uint64_t n_durations,
    const imfdiag_sweep_options* opts, const char* report_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IMFDIAG_H_ */
