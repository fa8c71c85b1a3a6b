#include <doctest.h>

#include <cmath>

#include "earcardio/core/interp.hpp"
#include "earcardio/dsp/fft.hpp"

using namespace earcardio;

namespace {

ImuSeries tone_series(double freq_hz, double rate_hz, double duration_s, double amp = 1.0) {
    const auto n = static_cast<std::size_t>(duration_s * rate_hz);
    ImuSeries s(rate_hz, 0, n);
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < n; ++i)
            s.set_value(c, i, amp * std::sin(2.0 * 3.141592653589793 * freq_hz * i / rate_hz));
    return s;
}

// FFT-oracle amplitude of the dominant bin
double dominant_amplitude(const std::vector<double>& x, double rate_hz, double freq_hz) {
    auto spec = earcardio::dsp::fft_real(x);
    const auto n = x.size();
    auto bin = static_cast<std::size_t>(freq_hz * n / rate_hz + 0.5);
    return 2.0 * std::abs(spec[bin]) / static_cast<double>(n);
}

} // namespace

TEST_CASE("resample preserves DC exactly") {
    ImuSeries s(25.0, 0, 250);
    for (int c = 0; c < kNumChannels; ++c)
        for (auto& v : s.channel(c)) v = 5.0;
    auto out = resample(s, 100.0);
    CHECK(out.size() == 1000);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.value(0, i) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("resample keeps a 2 Hz tone's amplitude within 1% going 25 -> 100 Hz") {
    auto s = tone_series(2.0, 25.0, 5.0);
    auto out = resample(s, 100.0);
    REQUIRE(out.size() == 500);
    // ignore edge transients: measure over the interior
    std::vector<double> mid(out.channel(0).begin() + 50, out.channel(0).end() - 50);
    double amp = dominant_amplitude(mid, 100.0, 2.0);
    CHECK(amp == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("resample at the identity rate is the identity within 1e-12") {
    auto s = tone_series(3.0, 25.0, 4.0, 0.7);
    auto out = resample(s, 25.0);
    REQUIRE(out.size() == s.size());
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(std::abs(out.value(c, i) - s.value(c, i)) < 1e-12);
}

TEST_CASE("resample requires a gap-free input") {
    auto s = tone_series(2.0, 25.0, 2.0);
    s.set_present(3, false);
    CHECK_THROWS_AS(resample(s, 100.0), DataError);
}

TEST_CASE("resample output slot count is round(duration * target_rate)") {
    ImuSeries s(25.0, 0, 77);
    auto out = resample(s, 100.0);
    CHECK(out.size() == 308);
    auto down = resample(s, 10.0);
    CHECK(down.size() == static_cast<std::size_t>(std::floor(77.0 / 25.0 * 10.0 + 0.5)));
}
