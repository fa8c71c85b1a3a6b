#include "earcardio/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "earcardio/core/beats.hpp"
#include "earcardio/util/errors.hpp"

namespace earcardio::metrics {

double bandpass_snr_db(const std::vector<double>& signal, const std::vector<double>& noise_floor,
                       double rate_hz, double lo_hz, double hi_hz) {
    hi_hz = std::min(hi_hz, rate_hz / 2.0);
    auto psd_s = dsp::welch_psd(signal, rate_hz);
    auto psd_n = dsp::welch_psd(noise_floor, rate_hz);
    double p_signal = dsp::band_mean_power(psd_s, lo_hz, hi_hz);
    double p_noise = dsp::band_mean_power(psd_n, lo_hz, hi_hz);
    if (p_noise <= 0.0) throw DataError("bandpass_snr_db: zero noise power, SNR undefined");
    return 10.0 * std::log10(p_signal / p_noise);
}

double peak_snr_db(const std::vector<double>& signal, const std::vector<double>& noise_floor) {
    double peak = 0.0;
    for (double v : signal) peak = std::max(peak, std::abs(v));
    double p_noise = 0.0;
    for (double v : noise_floor) p_noise += v * v;
    if (noise_floor.empty() || p_noise <= 0.0)
        throw DataError("peak_snr_db: zero noise power, SNR undefined");
    p_noise /= static_cast<double>(noise_floor.size());
    return 10.0 * std::log10(peak * peak / p_noise);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw DataError("cosine_similarity: zero-norm input, similarity undefined");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double soi(const std::vector<double>& recovered, const std::vector<double>& truth, double rate_hz,
           double lo_hz, double hi_hz) {
    hi_hz = std::min(hi_hz, rate_hz / 2.0);
    auto psd_e = dsp::welch_psd(recovered, rate_hz);
    auto psd_t = dsp::welch_psd(truth, rate_hz);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < psd_t.freqs_hz.size(); ++k) {
        double f = psd_t.freqs_hz[k];
        if (f < lo_hz || f > hi_hz) continue;
        num += std::min(psd_e.power[k], psd_t.power[k]);
        den += psd_t.power[k];
    }
    if (den <= 0.0) throw DataError("soi: truth band power is zero, SOI undefined");
    return num / den;
}

double mpe(const std::vector<double>& estimates, const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw DataError("mpe: need equal, nonzero-length lists");
    double acc = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (truths[i] == 0.0) throw DataError("mpe: zero truth value, MPE undefined");
        acc += std::abs((estimates[i] - truths[i]) / truths[i]);
    }
    return acc / static_cast<double>(estimates.size()) * 100.0;
}

HrIbi hr_ibi_from_waveform(const std::vector<double>& waveform, double rate_hz, double min_bpm,
                           double max_bpm) {
    auto seg = segment_beats(waveform, rate_hz, min_bpm, max_bpm);
    if (seg.size() < 2) throw DataError("hr_ibi_from_waveform: fewer than 2 beats detected");
    HrIbi out;
    out.ibi_ms = ibis_from_peaks(seg.peak_indices, rate_hz);
    double mean_ibi = 0.0;
    for (double v : out.ibi_ms) mean_ibi += v;
    mean_ibi /= static_cast<double>(out.ibi_ms.size());
    out.hr_bpm = 60000.0 / mean_ibi;
    return out;
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json j;
    j["similarity"] = similarity;
    j["soi"] = soi;
    j["mpe_hr_pct"] = mpe_hr_pct;
    j["mpe_ibi_pct"] = mpe_ibi_pct;
    if (!snr_db.empty()) j["snr_db"] = snr_db;
    j["soi_band_clamped"] = soi_band_clamped;
    j["estimator"] = {{"welch_segment_s", welch_segment_s},
                      {"welch_overlap", welch_overlap},
                      {"welch_window", welch_window}};
    return j.dump();
}

} // namespace earcardio::metrics
