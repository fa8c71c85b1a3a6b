#include "earcardio/dsp/welch.hpp"

#include <cmath>

#include "earcardio/dsp/fft.hpp"
#include "earcardio/util/errors.hpp"

namespace earcardio::dsp {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

PsdEstimate welch_psd(const std::vector<double>& x, double rate_hz, double segment_s,
                      double overlap) {
    const std::size_t n = x.size();
    if (n < 8) throw DataError("welch_psd: signal too short");

    std::size_t seg = static_cast<std::size_t>(std::floor(segment_s * rate_hz + 0.5));
    if (seg > n) seg = n;
    if (seg < 8) seg = 8;
    std::size_t hop = static_cast<std::size_t>(std::floor(static_cast<double>(seg) * (1.0 - overlap) + 0.5));
    if (hop == 0) hop = 1;

    std::vector<double> window(seg);
    double wss = 0.0; // sum of squared window, for density normalization
    for (std::size_t i = 0; i < seg; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(seg)));
        wss += window[i] * window[i];
    }

    const std::size_t n_bins = seg / 2 + 1;
    std::vector<double> acc(n_bins, 0.0);
    std::size_t n_segments = 0;

    std::vector<double> buf(seg);
    for (std::size_t start = 0; start + seg <= n; start += hop) {
        for (std::size_t i = 0; i < seg; ++i) buf[i] = x[start + i] * window[i];
        auto spec = fft_real(buf);
        for (std::size_t k = 0; k < n_bins; ++k) {
            double p = std::norm(spec[k]);
            // one-sided: double everything except DC and (for even seg) Nyquist
            if (k != 0 && !(seg % 2 == 0 && k == seg / 2)) p *= 2.0;
            acc[k] += p;
        }
        ++n_segments;
        if (start + seg == n) break;
    }
    if (n_segments == 0) throw DataError("welch_psd: no complete segment fits");

    PsdEstimate out;
    out.rate_hz = rate_hz;
    out.segment_len = static_cast<int>(seg);
    out.overlap = overlap;
    out.freqs_hz.resize(n_bins);
    out.power.resize(n_bins);
    const double norm = 1.0 / (rate_hz * wss * static_cast<double>(n_segments));
    for (std::size_t k = 0; k < n_bins; ++k) {
        out.freqs_hz[k] = static_cast<double>(k) * rate_hz / static_cast<double>(seg);
        out.power[k] = acc[k] * norm;
    }
    return out;
}

double band_mean_power(const PsdEstimate& psd, double lo_hz, double hi_hz) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
        if (psd.freqs_hz[k] >= lo_hz && psd.freqs_hz[k] <= hi_hz) {
            acc += psd.power[k];
            ++count;
        }
    }
    if (count == 0) throw DataError("band_mean_power: empty band");
    return acc / static_cast<double>(count);
}

double band_total_power(const PsdEstimate& psd, double lo_hz, double hi_hz) {
    double acc = 0.0;
    for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
        if (psd.freqs_hz[k] >= lo_hz && psd.freqs_hz[k] <= hi_hz) acc += psd.power[k];
    }
    return acc;
}

} // namespace earcardio::dsp
