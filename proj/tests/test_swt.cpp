#include <doctest.h>

#include <cmath>

#include "earcardio/dsp/fft.hpp"
#include "earcardio/dsp/swt.hpp"
#include "earcardio/util/rng.hpp"

using namespace earcardio;
using dsp::swt_decompose;
using dsp::Wavelet;

namespace {

std::vector<double> random_signal(std::size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

std::vector<double> tone(double freq_hz, double rate_hz, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * 3.141592653589793 * freq_hz * static_cast<double>(i) / rate_hz);
    return x;
}

} // namespace

TEST_CASE("constant input: details vanish, approximation carries the constant") {
    std::vector<double> x(125, 3.5);
    auto dec = swt_decompose(x);
    for (int lv = 1; lv <= dec.n_levels(); ++lv)
        for (double d : dec.detail(lv)) CHECK(std::abs(d) < 1e-10);
    // each lowpass stage multiplies a constant by sum(h) = sqrt(2)
    const double expected = 3.5 * std::pow(std::sqrt(2.0), dec.n_levels());
    for (double a : dec.approx()) CHECK(a == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("impulse response of level 1 equals the highpass filter (convolution oracle)") {
    std::vector<double> x(125, 0.0);
    const std::size_t pos = 60;
    x[pos] = 1.0;
    auto dec = swt_decompose(x);
    auto d1 = dec.detail(1);
    auto w = Wavelet::db2();
    // analysis is a correlation: d1[n] = sum_k g[k] x[n+k]
    for (std::size_t n = 40; n < 80; ++n) {
        double expected = 0.0;
        for (std::size_t k = 0; k < w.hi.size(); ++k)
            if (n + k == pos) expected = w.hi[k];
        CHECK(d1[n] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("perfect reconstruction on random 125-sample signals") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto x = random_signal(125, seed);
        auto dec = swt_decompose(x);
        auto back = dsp::iswt_full(dec);
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            err += (back[i] - x[i]) * (back[i] - x[i]);
            ref += x[i] * x[i];
        }
        CHECK(std::sqrt(err / ref) < 1e-9);
    }
}

TEST_CASE("energy conservation with the 1/2^level weights") {
    auto x = random_signal(125, 3);
    auto dec = swt_decompose(x);
    // the transform runs on the mirror-doubled signal, whose energy is 2x
    double lhs = 2.0 * energy(x);
    double rhs = 0.0;
    for (int lv = 1; lv <= dec.n_levels(); ++lv)
        rhs += energy(dec.details_ext()[static_cast<std::size_t>(lv - 1)]) / std::pow(2.0, lv);
    rhs += energy(dec.approx_ext()) / std::pow(2.0, dec.n_levels());
    CHECK(rhs == doctest::Approx(lhs).epsilon(1e-9));
}

TEST_CASE("shift covariance on interior samples") {
    const std::size_t n = 256, shift = 16;
    auto x = random_signal(n, 4);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i + shift < n; ++i) xs[i + shift] = x[i];
    for (std::size_t i = 0; i < shift; ++i) xs[i] = x[n - shift + i];

    auto dec = swt_decompose(x, 3);
    auto dec_s = swt_decompose(xs, 3);
    for (int lv = 1; lv <= 3; ++lv) {
        auto d = dec.detail(lv);
        auto ds = dec_s.detail(lv);
        const std::size_t reach = 3u << (lv - 1); // (taps-1) * 2^(level-1)
        for (std::size_t i = reach + shift; i + reach + shift < n; ++i)
            CHECK(ds[i + shift] == doctest::Approx(d[i]).epsilon(1e-9));
    }
}

TEST_CASE("too-short input raises a decomposition-length error") {
    std::vector<double> x(32, 1.0);
    CHECK_THROWS_AS(swt_decompose(x, 5), DataError);
}

TEST_CASE("cardiac reconstruction rejects a 0.5 Hz tone") {
    auto x = tone(0.5, 25.0, 250);
    auto out = dsp::swt_cardiac_reconstruct(swt_decompose(x));
    CHECK(energy(out) / energy(x) < 0.05);
}

TEST_CASE("cardiac reconstruction keeps a 5 Hz tone") {
    auto x = tone(5.0, 25.0, 250);
    auto out = dsp::swt_cardiac_reconstruct(swt_decompose(x));
    CHECK(energy(out) / energy(x) > 0.8);
}

TEST_CASE("cardiac reconstruction of zero input is zero") {
    std::vector<double> x(125, 0.0);
    auto out = dsp::swt_cardiac_reconstruct(swt_decompose(x));
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("denoising is linear") {
    auto x = random_signal(125, 5);
    auto y = random_signal(125, 6);
    const double a = 1.7, b = -0.6;
    std::vector<double> mix(125);
    for (std::size_t i = 0; i < 125; ++i) mix[i] = a * x[i] + b * y[i];
    auto dx = dsp::swt_denoise_channel(x, 25.0);
    auto dy = dsp::swt_denoise_channel(y, 25.0);
    auto dmix = dsp::swt_denoise_channel(mix, 25.0);
    for (std::size_t i = 0; i < 125; ++i)
        CHECK(dmix[i] == doctest::Approx(a * dx[i] + b * dy[i]).epsilon(1e-9));
}

TEST_CASE("swt_denoise_series needs a gap-free input") {
    ImuSeries s(25.0, 0, 125);
    s.set_present(5, false);
    CHECK_THROWS_AS(dsp::swt_denoise_series(s), DataError);
}

TEST_CASE("denoised clean tracks the brick-wall highpass of the input") {
    // broadband signal: compare against an FFT-oracle highpass at fs/2^(J+1)
    auto x = random_signal(1000, 8);
    auto ours = dsp::swt_denoise_channel(x, 25.0);
    auto oracle = dsp::brickwall_bandpass(x, 25.0, 25.0 / 8.0, 12.5);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 100; i + 100 < x.size(); ++i) {
        dot += ours[i] * oracle[i];
        na += ours[i] * ours[i];
        nb += oracle[i] * oracle[i];
    }
    CHECK(dot / std::sqrt(na * nb) > 0.9);
}
