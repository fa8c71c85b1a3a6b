#include <doctest.h>

#include <cmath>
#include <complex>

#include "earcardio/dsp/fft.hpp"
#include "earcardio/dsp/welch.hpp"
#include "earcardio/util/rng.hpp"

using namespace earcardio;

namespace {

// O(n^2) DFT oracle, independent of the fast path
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * 3.141592653589793238462643 * static_cast<double>(k * t % n) /
                         static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        y[k] = acc;
    }
    return y;
}

} // namespace

TEST_CASE("fft matches the naive DFT on power-of-two and awkward lengths") {
    Rng rng(7);
    for (std::size_t n : {8u, 50u, 125u, 128u, 200u, 243u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.normal(), rng.normal()};
        auto fast = dsp::fft(x);
        auto slow = naive_dft(x);
        double max_err = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            max_err = std::max(max_err, std::abs(fast[k] - slow[k]));
            scale = std::max(scale, std::abs(slow[k]));
        }
        CHECK(max_err / scale < 1e-10);
    }
}

TEST_CASE("fft inverse round-trips") {
    Rng rng(8);
    std::vector<std::complex<double>> x(125);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    auto back = dsp::fft(dsp::fft(x, false), true);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-10);
}

TEST_CASE("welch_psd integrates to the signal variance for white noise") {
    Rng rng(9);
    std::vector<double> x(20000);
    double var = 0.0;
    for (auto& v : x) {
        v = rng.normal();
        var += v * v;
    }
    var /= static_cast<double>(x.size());
    auto psd = dsp::welch_psd(x, 25.0);
    // integral of the one-sided density over [0, Nyquist]
    double df = psd.freqs_hz[1] - psd.freqs_hz[0];
    double total = 0.0;
    for (double p : psd.power) total += p * df;
    CHECK(total == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("welch_psd concentrates a tone's power at its frequency") {
    const double rate = 100.0, tone = 7.0;
    std::vector<double> x(3000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(2.0 * 3.141592653589793 * tone * static_cast<double>(i) / rate);
    auto psd = dsp::welch_psd(x, rate);
    double in_band = dsp::band_total_power(psd, tone - 1.0, tone + 1.0);
    double total = dsp::band_total_power(psd, 0.0, rate / 2.0);
    CHECK(in_band / total > 0.98);
}

TEST_CASE("brickwall_bandpass keeps in-band tones and kills out-of-band ones") {
    const double rate = 25.0;
    std::vector<double> x(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double t = static_cast<double>(i) / rate;
        x[i] = std::sin(2.0 * 3.141592653589793 * 5.0 * t) +
               std::sin(2.0 * 3.141592653589793 * 0.5 * t);
    }
    auto y = dsp::brickwall_bandpass(x, rate, 1.0, 10.0);
    // remaining signal should be nearly the 5 Hz tone alone
    double e_in = 0.0, e_ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double t = static_cast<double>(i) / rate;
        double ref = std::sin(2.0 * 3.141592653589793 * 5.0 * t);
        e_in += (y[i] - ref) * (y[i] - ref);
        e_ref += ref * ref;
    }
    CHECK(e_in / e_ref < 0.05);
}
