#pragma once

#include <vector>

namespace earcardio::dsp {

/// Welch power spectral density estimate. Parameters are carried with the
/// result so downstream reports can embed them.
struct PsdEstimate {
    std::vector<double> freqs_hz;  // ascending, [0, rate/2]
    std::vector<double> power;     // density, units^2 / Hz
    double rate_hz = 0.0;
    int segment_len = 0;
    double overlap = 0.5;
    const char* window = "hann";
};

/// Hann-windowed Welch PSD with 50% overlap; one-sided density normalization.
/// segment_s is clipped to the signal length when the signal is shorter.
PsdEstimate welch_psd(const std::vector<double>& x, double rate_hz, double segment_s = 2.0,
                      double overlap = 0.5);

/// Mean of the PSD over [lo_hz, hi_hz] (inclusive bin centers).
double band_mean_power(const PsdEstimate& psd, double lo_hz, double hi_hz);

/// Sum of the PSD over [lo_hz, hi_hz].
double band_total_power(const PsdEstimate& psd, double lo_hz, double hi_hz);

} // namespace earcardio::dsp
