#pragma once

#include <optional>

#include "earcardio/metrics/metrics.hpp"
#include "earcardio/nn/checkpoint.hpp"
#include "earcardio/pipeline/config.hpp"
#include "earcardio/synth/bcg.hpp"

namespace earcardio::pipeline {

struct CorpusEntry {
    std::string id;
    int subject = 0;
    std::string motion_kind;
    std::string clean_csv, motion_csv, mixed_csv, gt_json;
};

struct Manifest {
    std::string config_hash;
    std::string version;
    std::vector<CorpusEntry> entries;

    static Manifest read(const std::string& dir);
    void write(const std::string& dir) const;
};

/// synth: write the paired corpus (clean/motion/mixed CSVs, ground-truth
/// sidecars, manifest). Byte-identical on re-run with the same config.
Manifest cmd_synth(const ExperimentConfig& cfg);

/// train: subject-disjoint fold split, trains the requested stage
/// ("denoiser" or "reconstructor"), writes the checkpoint plus a loss-curve
/// CSV. Returns the checkpoint path.
std::string cmd_train(const ExperimentConfig& cfg, const std::string& corpus_dir,
                      const std::string& stage);

/// Subject -> fold assignment used by cmd_train (exposed for tests).
std::vector<int> fold_assignment(std::size_t n_subjects, int folds, uint64_t seed);

struct WindowRecord {
    std::string trace_id;
    std::size_t window_index = 0;
    bool discarded = false;
    double loss_rate = 0.0;
    double similarity = 0.0;
    double soi = 0.0;
    bool hr_valid = false;
    double hr_est = 0.0, hr_truth = 0.0;
    double ibi_est_ms = 0.0, ibi_truth_ms = 0.0;
    double mpe_hr = 0.0, mpe_ibi = 0.0;
    bool ensemble_degraded = false;
};

struct RunSummary {
    std::string variant;
    std::string scenario;
    std::string config_hash;
    std::size_t windows_total = 0;
    std::size_t windows_kept = 0;
    std::size_t windows_hr_valid = 0;
    double discard_rate = 0.0;
    double similarity_mean = 0.0, similarity_median = 0.0, similarity_p10 = 0.0;
    double soi_mean = 0.0, soi_median = 0.0, soi_p10 = 0.0;
    double mpe_hr_mean = 0.0, mpe_hr_median = 0.0;
    double mpe_ibi_mean = 0.0, mpe_ibi_median = 0.0;
    std::string results_dir;
};

/// run: corpus -> channel -> windows -> variant pipeline -> metrics. Writes
/// per-window JSONL and a summary JSON under <out>/results/<variant>_<scenario>/.
RunSummary cmd_run(const ExperimentConfig& cfg, const std::string& corpus_dir);

/// report: aggregate every result set under <results_dir> into report.csv and
/// report.txt; returns the rendered text. Throws DataError when no results
/// are found.
std::string cmd_report(const std::string& results_dir);

// ---- building blocks shared with tests ----

double window_norm_gain(const nn::Tensor& window);
nn::Tensor series_to_tensor(const ImuSeries& s);

/// Window-level pipeline for one reconstructed window (mask included).
struct WindowOutput {
    nn::Tensor enhanced;                 // 6 x T at 25 Hz (denormalized)
    std::optional<nn::ScgWaveform> scg;  // full variant only
    bool ensemble_degraded = false;
};
WindowOutput process_window(const ImuSeries& window, Variant variant,
                            const nn::DenoiserModel* denoiser,
                            const nn::ReconstructorModel* recon);

/// Ground-truth SCG peak indices (per-beat argmax) for a 100 Hz segment.
std::vector<std::size_t> scg_peak_indices(const std::vector<double>& scg, double rate_hz,
                                          const std::vector<int64_t>& onsets_ms,
                                          int64_t seg_start_ms, std::size_t seg_len);

} // namespace earcardio::pipeline
