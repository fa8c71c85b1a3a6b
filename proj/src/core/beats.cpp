#include "earcardio/core/beats.hpp"

#include <algorithm>
#include <cmath>

#include "earcardio/dsp/fft.hpp"

namespace earcardio {

namespace {

// rolling 90th percentile over a centered window; plain nth_element per
// sample is fine at these series lengths
std::vector<double> rolling_p90(const std::vector<double>& x, std::size_t half_window) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    std::vector<double> buf;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i > half_window ? i - half_window : 0;
        std::size_t hi = std::min(n, i + half_window + 1);
        buf.assign(x.begin() + static_cast<long>(lo), x.begin() + static_cast<long>(hi));
        auto k = static_cast<std::size_t>(0.9 * static_cast<double>(buf.size() - 1) + 0.5);
        std::nth_element(buf.begin(), buf.begin() + static_cast<long>(k), buf.end());
        out[i] = buf[k];
    }
    return out;
}

} // namespace

BeatSegmentation segment_beats(const std::vector<double>& channel, double rate_hz,
                               double min_bpm, double max_bpm) {
    BeatSegmentation seg;
    const std::size_t n = channel.size();
    if (n < 8) return seg;

    const double hi_band = std::min(10.0, rate_hz / 2.0 * 0.98);
    auto bp = dsp::brickwall_bandpass(channel, rate_hz, 1.0, hi_band);

    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(bp[i]);

    auto half_window = static_cast<std::size_t>(1.5 * rate_hz);
    auto p90 = rolling_p90(env, half_window);

    const double refractory_ms = 60000.0 / max_bpm;
    const auto refractory_slots = static_cast<std::size_t>(std::ceil(refractory_ms * rate_hz / 1000.0));

    // candidate anchors: local envelope maxima above the adaptive threshold
    struct Cand {
        std::size_t idx;
        double amp;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (env[i] < 0.5 * p90[i]) continue;
        if (env[i] >= env[i - 1] && env[i] > env[i + 1]) cands.push_back({i, env[i]});
    }
    // greedy by amplitude under the refractory constraint (ties by index)
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.amp != b.amp) return a.amp > b.amp;
        return a.idx < b.idx;
    });
    std::vector<std::size_t> accepted;
    for (const auto& c : cands) {
        bool blocked = false;
        for (auto p : accepted) {
            std::size_t gap = p > c.idx ? p - c.idx : c.idx - p;
            if (gap < refractory_slots) {
                blocked = true;
                break;
            }
        }
        if (!blocked) accepted.push_back(c.idx);
    }
    std::sort(accepted.begin(), accepted.end());
    seg.peak_indices = std::move(accepted);

    // extraction extents from the detected rhythm, clamped to the plausible range
    double ibi_ms = 60000.0 / std::min(90.0, max_bpm);
    auto ibis = ibis_from_peaks(seg.peak_indices, rate_hz);
    if (!ibis.empty()) {
        std::nth_element(ibis.begin(), ibis.begin() + static_cast<long>(ibis.size() / 2), ibis.end());
        double med = ibis[ibis.size() / 2];
        ibi_ms = std::clamp(med, 60000.0 / max_bpm, 60000.0 / min_bpm);
    }
    seg.window_pre_ms = 0.3 * ibi_ms;
    seg.window_post_ms = 0.5 * ibi_ms;
    return seg;
}

std::vector<double> ibis_from_peaks(const std::vector<std::size_t>& peaks, double rate_hz) {
    std::vector<double> out;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        out.push_back(static_cast<double>(peaks[i] - peaks[i - 1]) * 1000.0 / rate_hz);
    return out;
}

} // namespace earcardio
