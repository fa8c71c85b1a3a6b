#include "earcardio/core/interp.hpp"

#include <cmath>

namespace earcardio {

ImuSeries linear_interpolate(const ImuSeries& series) {
    const std::size_t n = series.size();
    if (series.present_count() < 2)
        throw DataError("linear_interpolate: fewer than 2 present slots, series is uninterpolatable");

    ImuSeries out = series;
    // indices of present slots
    std::vector<std::size_t> present;
    present.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (series.present(i)) present.push_back(i);

    for (int c = 0; c < kNumChannels; ++c) {
        auto& v = out.channel(c);
        // leading hold
        for (std::size_t i = 0; i < present.front(); ++i) v[i] = v[present.front()];
        // trailing hold
        for (std::size_t i = present.back() + 1; i < n; ++i) v[i] = v[present.back()];
        // interior gaps
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            std::size_t a = present[k], b = present[k + 1];
            if (b == a + 1) continue;
            double va = v[a], vb = v[b];
            for (std::size_t i = a + 1; i < b; ++i) {
                double t = static_cast<double>(i - a) / static_cast<double>(b - a);
                v[i] = va + (vb - va) * t;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) out.set_present(i, true);
    return out;
}

namespace {

constexpr int kSincHalfWidth = 16;

double hann_sinc(double x) {
    // windowed sinc tap at offset x, |x| <= half-width
    double ax = std::abs(x);
    if (ax >= kSincHalfWidth) return 0.0;
    double s;
    if (ax < 1e-12) {
        s = 1.0;
    } else {
        double px = 3.14159265358979323846 * x;
        s = std::sin(px) / px;
    }
    double w = 0.5 * (1.0 + std::cos(3.14159265358979323846 * x / kSincHalfWidth));
    return s * w;
}

double resample_at(const std::vector<double>& x, double pos, double cutoff_scale) {
    // cutoff_scale < 1 when downsampling: widen the sinc to the target Nyquist
    const int n = static_cast<int>(x.size());
    const double half = kSincHalfWidth / cutoff_scale;
    int lo = static_cast<int>(std::ceil(pos - half));
    int hi = static_cast<int>(std::floor(pos + half));
    double acc = 0.0, wsum = 0.0;
    for (int k = lo; k <= hi; ++k) {
        double w = cutoff_scale * hann_sinc((pos - k) * cutoff_scale);
        int idx = k < 0 ? 0 : (k >= n ? n - 1 : k); // edge hold
        acc += w * x[idx];
        wsum += w;
    }
    return wsum != 0.0 ? acc / wsum : 0.0;
}

} // namespace

ImuSeries resample(const ImuSeries& series, double target_rate_hz) {
    if (!series.gap_free())
        throw DataError("resample: input has missing slots, interpolate first");
    if (target_rate_hz <= 0.0) throw DataError("resample: non-positive target rate");

    const double rate_in = series.rate_hz();
    const std::size_t n_out = static_cast<std::size_t>(
        std::floor(series.duration_s() * target_rate_hz + 0.5));

    ImuSeries out(target_rate_hz, series.start_ms(), n_out);
    const double step = rate_in / target_rate_hz; // input samples per output slot
    const double cutoff = target_rate_hz < rate_in ? 1.0 / step : 1.0;

    for (int c = 0; c < kNumChannels; ++c) {
        const auto& x = series.channel(c);
        auto& y = out.channel(c);
        for (std::size_t j = 0; j < n_out; ++j)
            y[j] = resample_at(x, static_cast<double>(j) * step, cutoff);
    }
    return out;
}

std::vector<double> resample_channel(const std::vector<double>& x, double rate_hz,
                                     double target_rate_hz) {
    const double step = rate_hz / target_rate_hz;
    const double cutoff = target_rate_hz < rate_hz ? 1.0 / step : 1.0;
    const std::size_t n_out = static_cast<std::size_t>(
        std::floor(static_cast<double>(x.size()) / rate_hz * target_rate_hz + 0.5));
    std::vector<double> y(n_out);
    for (std::size_t j = 0; j < n_out; ++j)
        y[j] = resample_at(x, static_cast<double>(j) * step, cutoff);
    return y;
}

} // namespace earcardio
