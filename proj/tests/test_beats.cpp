#include <doctest.h>

#include <cmath>

#include "earcardio/core/beats.hpp"
#include "earcardio/synth/bcg.hpp"

using namespace earcardio;

namespace {

// 60 BPM train of raised-cosine pulses (~5 Hz content) at 25 Hz
std::vector<double> pulse_train(double rate_hz, double duration_s, double period_s) {
    const auto n = static_cast<std::size_t>(duration_s * rate_hz);
    std::vector<double> x(n, 0.0);
    const double width_s = 0.2;
    for (double t0 = 0.25; t0 + width_s < duration_s; t0 += period_s) {
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i) / rate_hz;
            if (t >= t0 && t <= t0 + width_s)
                x[i] += 1.0 - std::cos(2.0 * 3.141592653589793 * (t - t0) / width_s);
        }
    }
    return x;
}

} // namespace

TEST_CASE("segment_beats finds a 60 BPM pulse train at 1 s spacing") {
    auto x = pulse_train(25.0, 10.0, 1.0);
    auto seg = segment_beats(x, 25.0);
    CHECK(seg.size() >= 9);
    CHECK(seg.size() <= 10);
    auto ibis = ibis_from_peaks(seg.peak_indices, 25.0);
    for (double ibi : ibis) CHECK(ibi == doctest::Approx(1000.0).epsilon(0.05));
}

TEST_CASE("segment_beats returns empty on an all-zero signal") {
    std::vector<double> x(250, 0.0);
    auto seg = segment_beats(x, 25.0);
    CHECK(seg.empty());
}

TEST_CASE("segment_beats indices ascend and obey the refractory spacing") {
    auto x = pulse_train(25.0, 20.0, 0.8);
    auto seg = segment_beats(x, 25.0, 30.0, 220.0);
    const auto refractory = static_cast<std::size_t>(std::ceil(60000.0 / 220.0 * 25.0 / 1000.0));
    for (std::size_t i = 1; i < seg.size(); ++i) {
        CHECK(seg.peak_indices[i] > seg.peak_indices[i - 1]);
        CHECK(seg.peak_indices[i] - seg.peak_indices[i - 1] >= refractory);
    }
}

TEST_CASE("segment_beats recovers the generator's 75 BPM schedule") {
    // oracle: the generator's own beat schedule fixes median IBI at 800 ms
    synth::SubjectProfile profile;
    profile.hr_mean_bpm = 75.0;
    profile.hr_std_bpm = 0.0;
    auto [obs, gt] = synth::synth_subject(42, 60.0, profile);

    // detect on the strongest accel channel of the clean 25 Hz observation
    auto clean25 = gt.clean_observation_25hz();
    int best = 0;
    double best_p = -1.0;
    for (int c = 0; c < kNumChannels; ++c) {
        double p = 0.0;
        for (double v : clean25.channel(c)) p += v * v;
        if (p > best_p) {
            best_p = p;
            best = c;
        }
    }
    auto seg = segment_beats(clean25.channel(best), 25.0);
    REQUIRE(seg.size() >= 2);
    auto ibis = ibis_from_peaks(seg.peak_indices, 25.0);
    std::sort(ibis.begin(), ibis.end());
    double median = ibis[ibis.size() / 2];
    CHECK(std::abs(median - 800.0) <= 40.0); // within one 25 Hz slot
}
