#pragma once

#include <cstdint>
#include <string>

#include "earcardio/core/series.hpp"

namespace earcardio::synth {

enum class MotionTag { speak, saccade, type, nod, shake, walk, custom };

const char* motion_tag_name(MotionTag tag);
MotionTag motion_tag_from_name(const std::string& name);

/// One class of motion artifact: a dominant-frequency band plus an intensity
/// expressed relative to the clean-BCG RMS. Head/body motions (nod, shake,
/// walk) sit orders of magnitude above the BCG and carry a periodic gait
/// component.
struct MotionKind {
    MotionTag tag = MotionTag::custom;
    double band_lo_hz = 0.3;
    double band_hi_hz = 2.0;
    double intensity_ratio = 1.0;

    static MotionKind preset(MotionTag tag);
    bool has_gait_component() const {
        return tag == MotionTag::nod || tag == MotionTag::shake || tag == MotionTag::walk;
    }
    void validate() const;
};

// Clean-BCG RMS references the intensity ratios calibrate against, measured
// once from the default SubjectProfile observation (noiseless, 25 Hz).
inline constexpr double kRefBcgAccelRms = 8.05e-4;  // m/s^2
inline constexpr double kRefBcgGyroRms = 4.83e-3;   // dps

/// Paired synthesis product; observed == clean + motion exactly by
/// construction.
struct MixedTrace {
    ImuSeries observed;
    ImuSeries clean;
    ImuSeries motion;
};

/// Band-limited stochastic motion trace at 25 Hz: per-axis filtered noise
/// (brick-wall confined to the kind's band) plus, for gait kinds, a periodic
/// component with fundamental in [0.5, 2.5] Hz. Per sensor group the RMS is
/// calibrated to intensity_ratio times the clean-BCG reference RMS.
/// Deterministic in (kind, duration, seed).
ImuSeries synth_motion(const MotionKind& kind, double duration_s, uint64_t seed);

/// Per-slot, per-channel sum of two gap-free, shape-aligned series.
MixedTrace mix(const ImuSeries& clean, const ImuSeries& motion);

/// Parse an externally produced motion trace (shared CSV schema, gap-free).
ImuSeries ingest_external_motion(const std::string& path, double nominal_rate_hz = kDefaultRateHz);

} // namespace earcardio::synth
