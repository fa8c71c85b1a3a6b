#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "earcardio/core/series.hpp"

namespace earcardio::synth {

/// One parametric blood-pressure wave: a raised-cosine pulse placed inside the
/// beat. Timing is expressed as fractions of the beat period, amplitude in
/// mmHg. Zero outside [onset, onset + width].
struct PressureWave {
    double amplitude_mmhg = 40.0;
    double onset_frac = 0.0;
    double width_frac = 0.15;

    double value(double t_frac) const;
};

/// Aortic geometry plus the three pressure waves of the force model:
/// p0 at the ascending-aorta inlet, p1 at the arch, p2 at the
/// descending-aorta outlet.
struct AortaParams {
    double s_descending_cm2 = 3.2;
    double s_ascending_cm2 = 5.0;
    PressureWave p0{40.0, 0.02, 0.15};
    PressureWave p1{40.0, 0.06, 0.15};
    PressureWave p2{40.0, 0.11, 0.15};

    void validate() const;
};

/// BCG force at a moment within one beat (t as fraction of the beat period):
/// F(t) = S_d * (p1 - p2) - S_a * (p0 - p1).
double bcg_force(const AortaParams& aorta, double t_frac);

/// Fiducial peak train for one beat: H, I, J, K, L offsets in ms and signed
/// amplitudes relative to the J peak (= 1). The per-beat waveform is the
/// force pulse convolved with this train.
struct BeatTemplate {
    std::array<double, 5> peak_times_ms{0.0, 60.0, 120.0, 185.0, 250.0};
    std::array<double, 5> peak_amps{0.35, -0.55, 1.0, -0.45, 0.25};

    void validate() const;
};

/// Chest-style reference morphology used for the reconstruction target: a
/// sharper train whose dominant (AO) peak sits at the same in-beat offset as
/// the BCG J peak, so the two waveforms share their beat timing.
BeatTemplate scg_reference_template();

/// Everything that determines one synthetic subject.
struct SubjectProfile {
    double hr_mean_bpm = 72.0;
    double hr_std_bpm = 2.5;
    AortaParams aorta;
    BeatTemplate bcg_template;
    std::array<double, kNumChannels> mixing{0.25, 0.60, 0.45, 0.15, 0.48, 0.35};
    double accel_peak_amp = 0.005; // m/s^2
    double gyro_peak_amp = 0.03;   // dps
    std::array<double, kNumChannels> noise_floor{}; // per-channel sigma; default from peak SNR

    SubjectProfile();
    void normalize_mixing();
    void validate() const;
};

// Peak SNR the default noise floor is calibrated to (peak amplitude over
// noise sigma, in dB): 38 dB accel, 19 dB gyro.
inline constexpr double kAccelPeakSnrDb = 38.0;
inline constexpr double kGyroPeakSnrDb = 19.0;

/// Paired truth for one synthetic trace.
struct GroundTruth {
    std::vector<int64_t> beat_onsets_ms; // ascending
    std::vector<int64_t> ibi_ms;         // onset differences, integer ms
    ImuSeries clean_series;              // noiseless, 100 Hz
    std::vector<double> scg_ref;         // single channel, 100 Hz, peak-normalized
    double scg_rate_hz = 100.0;

    /// Noiseless 25 Hz projection of clean_series (decimated through the
    /// shared resampler; the generated observation equals this plus noise).
    ImuSeries clean_observation_25hz() const;
};

inline constexpr double kReferenceRateHz = 100.0;

/// Generate one subject's trace: 25 Hz observation (with sensor noise) plus
/// the ground truth. Deterministic in (seed, duration, profile).
std::pair<ImuSeries, GroundTruth> synth_subject(uint64_t seed, double duration_s,
                                                const SubjectProfile& profile);

/// Randomized population: mixing vectors uniform on the sphere, HR means in
/// [55, 95] BPM, +-15% template timing jitter. Deterministic given seed.
std::vector<SubjectProfile> sample_population(std::size_t n, uint64_t seed);

/// Ground-truth sidecar JSON, paired with the trace CSV by shared basename.
void write_ground_truth_json(const std::string& path, const GroundTruth& gt,
                             const SubjectProfile& profile);
GroundTruth read_ground_truth_json(const std::string& path);
SubjectProfile profile_from_ground_truth_json(const std::string& path);

} // namespace earcardio::synth
