#pragma once

#include <string>
#include <vector>

#include "earcardio/dsp/welch.hpp"

namespace earcardio::metrics {

/// Mean in-band PSD power ratio in dB over [lo_hz, hi_hz] (default 1-10 Hz,
/// the cardiac band). noise_floor comes from a stationary-surface recording
/// or the synthetic noise spec. Band edges are clamped to Nyquist.
double bandpass_snr_db(const std::vector<double>& signal, const std::vector<double>& noise_floor,
                       double rate_hz, double lo_hz = 1.0, double hi_hz = 10.0);

/// Peak amplitude over noise RMS, in dB; the figure the synthetic noise floor
/// is calibrated against.
double peak_snr_db(const std::vector<double>& signal, const std::vector<double>& noise_floor);

/// Inner product over the product of L2 norms. Throws on zero-norm input.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Spectral Overlap Index: sum(min(PSD_e, PSD_t)) / sum(PSD_t) over the band,
/// Welch PSD with 2 s segments, 50% overlap, Hann window. The band upper edge
/// is clamped to Nyquist when the rate is below 2*hi_hz.
double soi(const std::vector<double>& recovered, const std::vector<double>& truth, double rate_hz,
           double lo_hz = 1.0, double hi_hz = 50.0);

/// Mean Percentage Error: mean(|(Ve - Vt)/Vt|) * 100.
double mpe(const std::vector<double>& estimates, const std::vector<double>& truths);

/// HR and IBI sequence from detected beats. Throws when fewer than 2 beats
/// are found.
struct HrIbi {
    double hr_bpm = 0.0;
    std::vector<double> ibi_ms;
};
HrIbi hr_ibi_from_waveform(const std::vector<double>& waveform, double rate_hz,
                           double min_bpm = 30.0, double max_bpm = 220.0);

/// One window's evaluation, with the estimator parameters embedded so reports
/// are reproducible.
struct MetricReport {
    double similarity = 0.0;
    double soi = 0.0;
    double mpe_hr_pct = 0.0;
    double mpe_ibi_pct = 0.0;
    std::vector<double> snr_db; // per channel, optional
    bool soi_band_clamped = false;
    double welch_segment_s = 2.0;
    double welch_overlap = 0.5;
    std::string welch_window = "hann";

    std::string to_json() const;
};

} // namespace earcardio::metrics
