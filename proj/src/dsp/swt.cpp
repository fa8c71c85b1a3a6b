#include "earcardio/dsp/swt.hpp"

#include <cmath>
#include <fstream>

#include "earcardio/util/parallel.hpp"

namespace earcardio::dsp {

Wavelet Wavelet::db2() {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    Wavelet w;
    w.lo = {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
    // quadrature mirror: g[k] = (-1)^k h[F-1-k]
    w.hi.resize(4);
    for (int k = 0; k < 4; ++k) w.hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * w.lo[3 - k];
    w.name = "db2";
    return w;
}

namespace {

// circular correlation with the filter upsampled by `stride`
void analysis_step(const std::vector<double>& a, const std::vector<double>& f,
                   std::size_t stride, std::vector<double>& out) {
    const std::size_t m = a.size();
    out.resize(m);
    for (std::size_t n = 0; n < m; ++n) {
        double acc = 0.0;
        std::size_t idx = n;
        for (double tap : f) {
            acc += tap * a[idx];
            idx += stride;
            if (idx >= m) idx -= m;
        }
        out[n] = acc;
    }
}

// circular convolution with the filter upsampled by `stride`
void synthesis_step(const std::vector<double>& c, const std::vector<double>& f,
                    std::size_t stride, std::vector<double>& out) {
    const std::size_t m = c.size();
    out.assign(m, 0.0);
    for (std::size_t n = 0; n < m; ++n) {
        double acc = 0.0;
        std::size_t idx = n;
        for (double tap : f) {
            acc += tap * c[idx];
            idx = idx >= stride ? idx - stride : idx + m - stride;
        }
        out[n] = acc;
    }
}

} // namespace

SwtDecomposition swt_decompose(const std::vector<double>& x, int n_levels, const Wavelet& wavelet,
                               double fs_hz, int split_j) {
    const std::size_t len = x.size();
    const std::size_t support = wavelet.lo.size();
    if (n_levels < 1 || n_levels > 6) throw DataError("swt_decompose: N must be in [1, 6]");
    if (split_j < 1 || split_j >= n_levels) throw DataError("swt_decompose: require 1 <= J < N");
    const std::size_t top_filter_len = (support - 1) * (std::size_t{1} << (n_levels - 1)) + 1;
    if (len < top_filter_len)
        throw DataError("swt_decompose: input too short for " + std::to_string(n_levels) +
                        " levels (need >= " + std::to_string(top_filter_len) + " samples)");

    SwtDecomposition dec;
    dec.orig_len_ = len;
    dec.split_j_ = split_j;
    dec.fs_hz_ = fs_hz;
    dec.wavelet_ = wavelet;

    // mirror-doubled signal: [x0..x_{L-1}, x_{L-1}..x0], circularly continuous
    std::vector<double> a(2 * len);
    for (std::size_t i = 0; i < len; ++i) {
        a[i] = x[i];
        a[2 * len - 1 - i] = x[i];
    }

    dec.details_.resize(n_levels);
    std::vector<double> next;
    for (int lv = 0; lv < n_levels; ++lv) {
        const std::size_t stride = std::size_t{1} << lv;
        analysis_step(a, wavelet.hi, stride, dec.details_[lv]);
        analysis_step(a, wavelet.lo, stride, next);
        a.swap(next);
    }
    dec.approx_ = std::move(a);
    return dec;
}

std::vector<double> iswt(const SwtDecomposition& dec, bool cardiac_only) {
    const int n_levels = dec.n_levels();
    const std::size_t m = dec.approx_.size();
    const Wavelet& w = dec.wavelet_;

    std::vector<double> a;
    if (cardiac_only)
        a.assign(m, 0.0);
    else
        a = dec.approx_;

    std::vector<double> from_a, from_d;
    for (int lv = n_levels - 1; lv >= 0; --lv) {
        const std::size_t stride = std::size_t{1} << lv;
        const bool keep_detail = !cardiac_only || (lv + 1) <= dec.split_j_;
        synthesis_step(a, w.lo, stride, from_a);
        if (keep_detail) {
            synthesis_step(dec.details_[lv], w.hi, stride, from_d);
            for (std::size_t i = 0; i < m; ++i) a[i] = 0.5 * (from_a[i] + from_d[i]);
        } else {
            for (std::size_t i = 0; i < m; ++i) a[i] = 0.5 * from_a[i];
        }
    }
    a.resize(dec.orig_len_);
    return a;
}

std::vector<double> SwtDecomposition::detail(int level) const {
    const auto& full = details_.at(level - 1);
    return std::vector<double>(full.begin(), full.begin() + static_cast<long>(orig_len_));
}

std::vector<double> SwtDecomposition::approx() const {
    return std::vector<double>(approx_.begin(), approx_.begin() + static_cast<long>(orig_len_));
}

ImuSeries swt_denoise_series(const ImuSeries& series, int n_levels, int split_j) {
    if (!series.gap_free())
        throw DataError("swt_denoise_series: input has missing slots, interpolate first");
    ImuSeries out = series;
    par::parallel_for(kNumChannels, [&](std::size_t c) {
        auto dec = swt_decompose(series.channel(static_cast<int>(c)), n_levels, Wavelet::db2(),
                                 series.rate_hz(), split_j);
        out.channel(static_cast<int>(c)) = swt_cardiac_reconstruct(dec);
    });
    return out;
}

std::vector<double> swt_denoise_channel(const std::vector<double>& x, double fs_hz, int n_levels,
                                        int split_j) {
    auto dec = swt_decompose(x, n_levels, Wavelet::db2(), fs_hz, split_j);
    return swt_cardiac_reconstruct(dec);
}

void swt_dump_csv(const SwtDecomposition& dec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("swt_dump_csv: cannot open " + path);
    f << "index";
    for (int lv = 1; lv <= dec.n_levels(); ++lv) f << ",D" << lv;
    f << ",A" << dec.n_levels() << "\n";
    auto approx = dec.approx();
    std::vector<std::vector<double>> details;
    for (int lv = 1; lv <= dec.n_levels(); ++lv) details.push_back(dec.detail(lv));
    char buf[64];
    for (std::size_t i = 0; i < dec.input_len(); ++i) {
        f << i;
        for (const auto& d : details) {
            std::snprintf(buf, sizeof(buf), ",%.17g", d[i]);
            f << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g", approx[i]);
        f << buf << "\n";
    }
}

} // namespace earcardio::dsp
