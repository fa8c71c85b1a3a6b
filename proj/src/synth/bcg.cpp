#include "earcardio/synth/bcg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "earcardio/core/csv.hpp"
#include "earcardio/core/interp.hpp"
#include "earcardio/util/rng.hpp"

namespace earcardio::synth {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMinIbiMs = 60000.0 / 220.0;
constexpr double kMaxIbiMs = 60000.0 / 30.0;
// consecutive fiducial peaks must imply oscillation above 3 Hz
constexpr double kMaxPeakSpacingMs = 1000.0 / (2.0 * 3.0);
} // namespace

double PressureWave::value(double t_frac) const {
    double t = t_frac - std::floor(t_frac); // single-beat periodic
    if (t < onset_frac || t > onset_frac + width_frac) return 0.0;
    double phase = (t - onset_frac) / width_frac;
    return amplitude_mmhg * 0.5 * (1.0 - std::cos(2.0 * kPi * phase));
}

void AortaParams::validate() const {
    if (!(s_descending_cm2 > 0.0) || !(s_ascending_cm2 > 0.0))
        throw DataError("AortaParams: cross sections must be positive");
    for (const auto* w : {&p0, &p1, &p2}) {
        if (!std::isfinite(w->amplitude_mmhg) || w->width_frac <= 0.0 || w->width_frac > 1.0 ||
            w->onset_frac < 0.0 || w->onset_frac >= 1.0)
            throw DataError("AortaParams: malformed pressure wave");
    }
}

double bcg_force(const AortaParams& aorta, double t_frac) {
    const double p0 = aorta.p0.value(t_frac);
    const double p1 = aorta.p1.value(t_frac);
    const double p2 = aorta.p2.value(t_frac);
    return aorta.s_descending_cm2 * (p1 - p2) - aorta.s_ascending_cm2 * (p0 - p1);
}

void BeatTemplate::validate() const {
    for (std::size_t i = 1; i < peak_times_ms.size(); ++i) {
        if (!(peak_times_ms[i] > peak_times_ms[i - 1]))
            throw DataError("BeatTemplate: peak times must be strictly increasing");
        if (peak_times_ms[i] - peak_times_ms[i - 1] > kMaxPeakSpacingMs)
            throw DataError("BeatTemplate: peak spacing implies content below 3 Hz");
    }
    double j_amp = std::abs(peak_amps[2]);
    for (double a : peak_amps) {
        if (!std::isfinite(a)) throw DataError("BeatTemplate: non-finite amplitude");
        if (std::abs(a) > j_amp + 1e-12)
            throw DataError("BeatTemplate: J peak must dominate in magnitude");
    }
}

BeatTemplate scg_reference_template() {
    BeatTemplate t;
    t.peak_times_ms = {70.0, 120.0, 165.0, 220.0, 280.0};
    t.peak_amps = {-0.35, 1.0, -0.55, 0.3, -0.15};
    return t;
}

SubjectProfile::SubjectProfile() {
    noise_floor[0] = noise_floor[1] = noise_floor[2] =
        accel_peak_amp / std::pow(10.0, kAccelPeakSnrDb / 20.0);
    noise_floor[3] = noise_floor[4] = noise_floor[5] =
        gyro_peak_amp / std::pow(10.0, kGyroPeakSnrDb / 20.0);
    normalize_mixing();
}

void SubjectProfile::normalize_mixing() {
    double norm = 0.0;
    for (double m : mixing) norm += m * m;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& m : mixing) m /= norm;
}

void SubjectProfile::validate() const {
    aorta.validate();
    bcg_template.validate();
    if (hr_mean_bpm < 30.0 || hr_mean_bpm > 220.0)
        throw DataError("SubjectProfile: hr_mean outside [30, 220] BPM");
    if (hr_std_bpm < 0.0) throw DataError("SubjectProfile: negative hr_std");
    double norm = 0.0, amax = 0.0, gmax = 0.0;
    for (int c = 0; c < kNumChannels; ++c) {
        norm += mixing[c] * mixing[c];
        if (c < 3)
            amax = std::max(amax, std::abs(mixing[c]));
        else
            gmax = std::max(gmax, std::abs(mixing[c]));
    }
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-9)
        throw DataError("SubjectProfile: mixing vector must have unit norm");
    if (amax == 0.0 || gmax == 0.0)
        throw DataError("SubjectProfile: mixing needs a nonzero accel and gyro entry");
    if (accel_peak_amp <= 0.0 || gyro_peak_amp <= 0.0)
        throw DataError("SubjectProfile: peak amplitudes must be positive");
    for (double s : noise_floor)
        if (s < 0.0 || !std::isfinite(s)) throw DataError("SubjectProfile: bad noise floor");
}

namespace {

// additive render of (force pulse) * (fiducial train) for every beat
std::vector<double> render_scalar(const std::vector<int64_t>& onsets,
                                  const std::vector<int64_t>& periods_ms,
                                  const AortaParams& aorta, const BeatTemplate& tmpl,
                                  double rate_hz, std::size_t n_samples) {
    std::vector<double> out(n_samples, 0.0);
    const double dt_ms = 1000.0 / rate_hz;
    for (std::size_t b = 0; b < onsets.size(); ++b) {
        const double period = static_cast<double>(periods_ms[b]);
        for (std::size_t p = 0; p < tmpl.peak_times_ms.size(); ++p) {
            const double t0 = static_cast<double>(onsets[b]) + tmpl.peak_times_ms[p];
            const double amp = tmpl.peak_amps[p];
            auto i_lo = static_cast<long>(std::ceil(t0 / dt_ms));
            auto i_hi = static_cast<long>(std::floor((t0 + period) / dt_ms));
            i_lo = std::max<long>(i_lo, 0);
            i_hi = std::min<long>(i_hi, static_cast<long>(n_samples) - 1);
            for (long i = i_lo; i <= i_hi; ++i) {
                double t_frac = (static_cast<double>(i) * dt_ms - t0) / period;
                out[static_cast<std::size_t>(i)] += amp * bcg_force(aorta, t_frac);
            }
        }
    }
    return out;
}

} // namespace

std::pair<ImuSeries, GroundTruth> synth_subject(uint64_t seed, double duration_s,
                                                const SubjectProfile& profile) {
    profile.validate();
    if (duration_s < 10.0) throw DataError("synth_subject: duration must be >= 10 s");

    Rng rng(seed);
    const double ibi_mean = 60000.0 / profile.hr_mean_bpm;
    // delta-method: BPM spread mapped to IBI spread
    const double ibi_sigma = 60000.0 * profile.hr_std_bpm / (profile.hr_mean_bpm * profile.hr_mean_bpm);
    const auto duration_ms = static_cast<int64_t>(std::llround(duration_s * 1000.0));

    GroundTruth gt;
    int64_t t = 0;
    while (t < duration_ms) {
        gt.beat_onsets_ms.push_back(t);
        double ibi = profile.hr_std_bpm == 0.0 ? ibi_mean : rng.normal(ibi_mean, ibi_sigma);
        ibi = std::clamp(ibi, kMinIbiMs, kMaxIbiMs);
        t += static_cast<int64_t>(std::llround(ibi));
    }
    std::vector<int64_t> periods;
    for (std::size_t b = 0; b + 1 < gt.beat_onsets_ms.size(); ++b) {
        gt.ibi_ms.push_back(gt.beat_onsets_ms[b + 1] - gt.beat_onsets_ms[b]);
        periods.push_back(gt.ibi_ms.back());
    }
    periods.push_back(static_cast<int64_t>(std::llround(ibi_mean))); // last beat

    const auto n100 = static_cast<std::size_t>(std::llround(duration_s * kReferenceRateHz));
    auto scalar = render_scalar(gt.beat_onsets_ms, periods, profile.aorta, profile.bcg_template,
                                kReferenceRateHz, n100);

    // project onto the 6 axes, then calibrate each sensor group's peak
    ImuSeries clean100(kReferenceRateHz, 0, n100);
    double accel_max = 0.0, gyro_max = 0.0;
    for (int c = 0; c < kNumChannels; ++c) {
        double m = std::abs(profile.mixing[c]);
        (c < 3 ? accel_max : gyro_max) = std::max(c < 3 ? accel_max : gyro_max, m);
    }
    double scalar_max = 0.0;
    for (double v : scalar) scalar_max = std::max(scalar_max, std::abs(v));
    if (scalar_max == 0.0) throw DataError("synth_subject: degenerate force model (all-zero waveform)");
    const double accel_gain = profile.accel_peak_amp / (accel_max * scalar_max);
    const double gyro_gain = profile.gyro_peak_amp / (gyro_max * scalar_max);
    for (int c = 0; c < kNumChannels; ++c) {
        const double g = (c < 3 ? accel_gain : gyro_gain) * profile.mixing[c];
        auto& ch = clean100.channel(c);
        for (std::size_t i = 0; i < n100; ++i) ch[i] = g * scalar[i];
    }
    gt.clean_series = clean100;

    // SCG reference from the same beat schedule: sharper pressure pulses and
    // an AO-dominant train, peak-normalized
    AortaParams scg_aorta = profile.aorta;
    scg_aorta.p0.width_frac = scg_aorta.p1.width_frac = scg_aorta.p2.width_frac = 0.08;
    scg_aorta.p0.onset_frac = 0.02;
    scg_aorta.p1.onset_frac = 0.045;
    scg_aorta.p2.onset_frac = 0.075;
    gt.scg_ref = render_scalar(gt.beat_onsets_ms, periods, scg_aorta, scg_reference_template(),
                               kReferenceRateHz, n100);
    double scg_max = 0.0;
    for (double v : gt.scg_ref) scg_max = std::max(scg_max, std::abs(v));
    if (scg_max > 0.0)
        for (double& v : gt.scg_ref) v /= scg_max;

    // 25 Hz observation: decimate the reference-rate truth through the shared
    // resampler, then add the sensor noise floor
    ImuSeries obs = resample(clean100, kDefaultRateHz);
    for (int c = 0; c < kNumChannels; ++c) {
        auto& ch = obs.channel(c);
        const double sigma = profile.noise_floor[c];
        for (double& v : ch) v += sigma * rng.normal();
    }
    return {std::move(obs), std::move(gt)};
}

ImuSeries GroundTruth::clean_observation_25hz() const {
    return resample(clean_series, kDefaultRateHz);
}

std::vector<SubjectProfile> sample_population(std::size_t n, uint64_t seed) {
    if (n < 1) throw DataError("sample_population: n must be >= 1");
    std::vector<SubjectProfile> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, i));
        SubjectProfile p;
        // mixing uniform on the sphere; redraw the rare degenerate draws so a
        // sensor group never ends up silent
        for (;;) {
            double norm = 0.0;
            for (int c = 0; c < kNumChannels; ++c) {
                p.mixing[c] = rng.normal();
                norm += p.mixing[c] * p.mixing[c];
            }
            norm = std::sqrt(norm);
            if (norm < 1e-9) continue;
            for (double& m : p.mixing) m /= norm;
            double amax = 0.0, gmax = 0.0;
            for (int c = 0; c < 3; ++c) amax = std::max(amax, std::abs(p.mixing[c]));
            for (int c = 3; c < 6; ++c) gmax = std::max(gmax, std::abs(p.mixing[c]));
            if (amax >= 0.05 && gmax >= 0.05) break;
        }
        p.hr_mean_bpm = rng.uniform(55.0, 95.0);
        p.hr_std_bpm = rng.uniform(1.0, 4.0);
        // jitter the fiducial intervals by +-15%, keeping the ordering
        BeatTemplate base;
        double t_acc = base.peak_times_ms[0];
        p.bcg_template.peak_times_ms[0] = t_acc;
        for (std::size_t k = 1; k < base.peak_times_ms.size(); ++k) {
            double gap = base.peak_times_ms[k] - base.peak_times_ms[k - 1];
            t_acc += gap * (1.0 + rng.uniform(-0.15, 0.15));
            p.bcg_template.peak_times_ms[k] = t_acc;
        }
        p.validate();
        out.push_back(p);
    }
    return out;
}

namespace {

nlohmann::ordered_json profile_to_json(const SubjectProfile& p) {
    nlohmann::ordered_json j;
    j["hr_mean_bpm"] = p.hr_mean_bpm;
    j["hr_std_bpm"] = p.hr_std_bpm;
    j["aorta"] = {{"s_descending_cm2", p.aorta.s_descending_cm2},
                  {"s_ascending_cm2", p.aorta.s_ascending_cm2}};
    auto wave = [](const PressureWave& w) {
        return nlohmann::ordered_json{
            {"amplitude_mmhg", w.amplitude_mmhg}, {"onset_frac", w.onset_frac}, {"width_frac", w.width_frac}};
    };
    j["aorta"]["p0"] = wave(p.aorta.p0);
    j["aorta"]["p1"] = wave(p.aorta.p1);
    j["aorta"]["p2"] = wave(p.aorta.p2);
    j["template"] = {{"peak_times_ms", p.bcg_template.peak_times_ms},
                     {"peak_amps", p.bcg_template.peak_amps}};
    j["mixing"] = p.mixing;
    j["accel_peak_amp"] = p.accel_peak_amp;
    j["gyro_peak_amp"] = p.gyro_peak_amp;
    j["noise_floor"] = p.noise_floor;
    return j;
}

SubjectProfile profile_from_json(const nlohmann::json& j) {
    SubjectProfile p;
    p.hr_mean_bpm = j.at("hr_mean_bpm").get<double>();
    p.hr_std_bpm = j.at("hr_std_bpm").get<double>();
    p.aorta.s_descending_cm2 = j.at("aorta").at("s_descending_cm2").get<double>();
    p.aorta.s_ascending_cm2 = j.at("aorta").at("s_ascending_cm2").get<double>();
    auto wave = [](const nlohmann::json& wj, PressureWave& w) {
        w.amplitude_mmhg = wj.at("amplitude_mmhg").get<double>();
        w.onset_frac = wj.at("onset_frac").get<double>();
        w.width_frac = wj.at("width_frac").get<double>();
    };
    wave(j.at("aorta").at("p0"), p.aorta.p0);
    wave(j.at("aorta").at("p1"), p.aorta.p1);
    wave(j.at("aorta").at("p2"), p.aorta.p2);
    auto times = j.at("template").at("peak_times_ms").get<std::vector<double>>();
    auto amps = j.at("template").at("peak_amps").get<std::vector<double>>();
    std::copy_n(times.begin(), 5, p.bcg_template.peak_times_ms.begin());
    std::copy_n(amps.begin(), 5, p.bcg_template.peak_amps.begin());
    auto mixing = j.at("mixing").get<std::vector<double>>();
    std::copy_n(mixing.begin(), kNumChannels, p.mixing.begin());
    p.accel_peak_amp = j.at("accel_peak_amp").get<double>();
    p.gyro_peak_amp = j.at("gyro_peak_amp").get<double>();
    auto nf = j.at("noise_floor").get<std::vector<double>>();
    std::copy_n(nf.begin(), kNumChannels, p.noise_floor.begin());
    return p;
}

std::string sibling_path(const std::string& json_path, const std::string& suffix) {
    std::filesystem::path p(json_path);
    auto stem = p.stem().string();
    // strip a trailing "_gt" so siblings share the trace basename
    if (stem.size() > 3 && stem.ends_with("_gt")) stem = stem.substr(0, stem.size() - 3);
    return (p.parent_path() / (stem + suffix)).string();
}

} // namespace

void write_ground_truth_json(const std::string& path, const GroundTruth& gt,
                             const SubjectProfile& profile) {
    nlohmann::ordered_json j;
    j["beat_onsets_ms"] = gt.beat_onsets_ms;
    j["ibi_ms"] = gt.ibi_ms;
    j["profile"] = profile_to_json(profile);
    j["scg_rate_hz"] = gt.scg_rate_hz;
    std::ofstream f(path);
    if (!f) throw DataError("write_ground_truth_json: cannot open " + path);
    f << j.dump(2) << "\n";

    write_trace_csv(sibling_path(path, "_clean100.csv"), gt.clean_series);
    write_waveform_csv(sibling_path(path, "_scg100.csv"), gt.scg_ref, gt.scg_rate_hz, 0, "scg");
}

GroundTruth read_ground_truth_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("read_ground_truth_json: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    GroundTruth gt;
    gt.beat_onsets_ms = j.at("beat_onsets_ms").get<std::vector<int64_t>>();
    gt.ibi_ms = j.at("ibi_ms").get<std::vector<int64_t>>();
    gt.scg_rate_hz = j.at("scg_rate_hz").get<double>();
    gt.clean_series = read_trace_csv(sibling_path(path, "_clean100.csv"), kReferenceRateHz);
    gt.scg_ref = read_waveform_csv(sibling_path(path, "_scg100.csv"));
    return gt;
}

SubjectProfile profile_from_ground_truth_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("profile_from_ground_truth_json: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    return profile_from_json(j.at("profile"));
}

} // namespace earcardio::synth
