#include "earcardio/synth/motion.hpp"

#include <cmath>

#include "earcardio/core/csv.hpp"
#include "earcardio/dsp/fft.hpp"
#include "earcardio/util/rng.hpp"

namespace earcardio::synth {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* motion_tag_name(MotionTag tag) {
    switch (tag) {
        case MotionTag::speak: return "speak";
        case MotionTag::saccade: return "saccade";
        case MotionTag::type: return "type";
        case MotionTag::nod: return "nod";
        case MotionTag::shake: return "shake";
        case MotionTag::walk: return "walk";
        case MotionTag::custom: return "custom";
    }
    return "custom";
}

MotionTag motion_tag_from_name(const std::string& name) {
    for (auto tag : {MotionTag::speak, MotionTag::saccade, MotionTag::type, MotionTag::nod,
                     MotionTag::shake, MotionTag::walk, MotionTag::custom}) {
        if (name == motion_tag_name(tag)) return tag;
    }
    throw ConfigError("unknown motion kind '" + name + "'");
}

MotionKind MotionKind::preset(MotionTag tag) {
    MotionKind k;
    k.tag = tag;
    switch (tag) {
        case MotionTag::speak:   k.band_lo_hz = 0.3; k.band_hi_hz = 2.0; k.intensity_ratio = 1.0; break;
        case MotionTag::saccade: k.band_lo_hz = 0.5; k.band_hi_hz = 3.0; k.intensity_ratio = 0.5; break;
        case MotionTag::type:    k.band_lo_hz = 0.5; k.band_hi_hz = 3.0; k.intensity_ratio = 0.7; break;
        case MotionTag::nod:     k.band_lo_hz = 0.3; k.band_hi_hz = 2.0; k.intensity_ratio = 30.0; break;
        case MotionTag::shake:   k.band_lo_hz = 0.5; k.band_hi_hz = 2.5; k.intensity_ratio = 50.0; break;
        case MotionTag::walk:    k.band_lo_hz = 0.5; k.band_hi_hz = 3.0; k.intensity_ratio = 40.0; break;
        case MotionTag::custom: break;
    }
    return k;
}

void MotionKind::validate() const {
    if (!(band_lo_hz < band_hi_hz)) throw DataError("MotionKind: empty frequency band");
    if (band_lo_hz <= 0.0 || band_hi_hz > 12.5)
        throw DataError("MotionKind: band must lie within (0, 12.5] Hz");
    if (!(intensity_ratio > 0.0)) throw DataError("MotionKind: intensity_ratio must be positive");
    if (has_gait_component() && intensity_ratio < 10.0)
        throw DataError("MotionKind: head/body motions must be >= 10x the BCG RMS");
}

ImuSeries synth_motion(const MotionKind& kind, double duration_s, uint64_t seed) {
    kind.validate();
    if (duration_s < 1.0) throw DataError("synth_motion: duration must be >= 1 s");

    Rng rng(seed);
    const auto n = static_cast<std::size_t>(std::llround(duration_s * kDefaultRateHz));
    ImuSeries out(kDefaultRateHz, 0, n);

    // gait fundamental shared by all axes of one trace
    double gait_hz = 0.0;
    if (kind.has_gait_component()) {
        double lo = std::max(0.5, kind.band_lo_hz);
        double hi = std::min(2.5, kind.band_hi_hz);
        gait_hz = rng.uniform(lo, hi);
    }

    for (int c = 0; c < kNumChannels; ++c) {
        std::vector<double> noise(n);
        for (auto& v : noise) v = rng.normal();
        auto banded = dsp::brickwall_bandpass(noise, kDefaultRateHz, kind.band_lo_hz, kind.band_hi_hz);

        double axis_gain = rng.uniform(0.5, 1.5);
        double phase = rng.uniform(0.0, 2.0 * kPi);
        if (gait_hz > 0.0) {
            double nrms = 0.0;
            for (double v : banded) nrms += v * v;
            nrms = std::sqrt(nrms / static_cast<double>(n));
            const double amp = 1.5 * nrms * std::sqrt(2.0);
            const bool harmonic = 2.0 * gait_hz <= kind.band_hi_hz;
            for (std::size_t i = 0; i < n; ++i) {
                double t = static_cast<double>(i) / kDefaultRateHz;
                banded[i] += amp * std::sin(2.0 * kPi * gait_hz * t + phase);
                if (harmonic) banded[i] += 0.35 * amp * std::sin(4.0 * kPi * gait_hz * t + 2.0 * phase);
            }
        }
        auto& ch = out.channel(c);
        for (std::size_t i = 0; i < n; ++i) ch[i] = axis_gain * banded[i];
    }

    // calibrate each sensor group to intensity_ratio x reference BCG RMS
    auto group_rms = [&](int c0, int c1) {
        double acc = 0.0;
        for (int c = c0; c < c1; ++c)
            for (double v : out.channel(c)) acc += v * v;
        return std::sqrt(acc / (static_cast<double>(n) * (c1 - c0)));
    };
    const double accel_rms = group_rms(0, 3);
    const double gyro_rms = group_rms(3, 6);
    const double accel_gain = kind.intensity_ratio * kRefBcgAccelRms / accel_rms;
    const double gyro_gain = kind.intensity_ratio * kRefBcgGyroRms / gyro_rms;
    for (int c = 0; c < kNumChannels; ++c) {
        const double g = c < 3 ? accel_gain : gyro_gain;
        for (double& v : out.channel(c)) v *= g;
    }
    return out;
}

MixedTrace mix(const ImuSeries& clean, const ImuSeries& motion) {
    if (clean.size() != motion.size() || clean.rate_hz() != motion.rate_hz())
        throw DataError("mix: clean and motion series are not aligned");
    if (!clean.gap_free() || !motion.gap_free())
        throw DataError("mix: both inputs must be gap-free");
    MixedTrace t{clean, clean, motion};
    for (int c = 0; c < kNumChannels; ++c) {
        auto& obs = t.observed.channel(c);
        const auto& m = motion.channel(c);
        for (std::size_t i = 0; i < obs.size(); ++i) obs[i] += m[i];
    }
    return t;
}

ImuSeries ingest_external_motion(const std::string& path, double nominal_rate_hz) {
    ImuSeries s = read_trace_csv(path, nominal_rate_hz);
    if (!s.gap_free()) throw DataError(path + ": external motion trace has gaps");
    s.validate(path);
    return s;
}

} // namespace earcardio::synth
