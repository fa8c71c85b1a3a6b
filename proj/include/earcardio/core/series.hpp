#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "earcardio/util/errors.hpp"

namespace earcardio {

inline constexpr int kNumChannels = 6;        // ax ay az gx gy gz
inline constexpr double kDefaultRateHz = 25.0;

/// One received 6-axis IMU sample. Accelerometer in m/s^2, gyroscope in dps.
struct ImuSample {
    int64_t t_ms = 0;
    std::array<double, 3> accel{};
    std::array<double, 3> gyro{};

    double channel(int c) const { return c < 3 ? accel[c] : gyro[c - 3]; }
};

/// Uniformly slotted 6-axis time series with an explicit per-slot missing
/// mask. Slot i nominally sits at start_ms + round(i * 1000 / rate). Values at
/// masked-out slots are meaningless (kept as 0); presence is tracked solely by
/// the mask so the mask can later feed the neural stage as its own channel.
class ImuSeries {
public:
    ImuSeries() = default;
    ImuSeries(double rate_hz, int64_t start_ms, std::size_t n)
        : rate_hz_(rate_hz), start_ms_(start_ms), mask_(n, 1) {
        for (auto& c : ch_) c.assign(n, 0.0);
    }

    double rate_hz() const { return rate_hz_; }
    int64_t start_ms() const { return start_ms_; }
    std::size_t size() const { return mask_.size(); }
    bool empty() const { return mask_.empty(); }

    // round-half-up slot clock, integer milliseconds
    int64_t slot_time_ms(std::size_t i) const {
        return start_ms_ + static_cast<int64_t>(std::floor(static_cast<double>(i) * 1000.0 / rate_hz_ + 0.5));
    }

    bool present(std::size_t i) const { return mask_[i] != 0; }
    void set_present(std::size_t i, bool p) { mask_[i] = p ? 1 : 0; }

    double value(int c, std::size_t i) const { return ch_[c][i]; }
    void set_value(int c, std::size_t i, double v) { ch_[c][i] = v; }

    std::vector<double>& channel(int c) { return ch_[c]; }
    const std::vector<double>& channel(int c) const { return ch_[c]; }

    const std::vector<uint8_t>& mask() const { return mask_; }
    std::vector<uint8_t>& mask() { return mask_; }

    std::size_t present_count() const {
        std::size_t k = 0;
        for (auto b : mask_) k += b;
        return k;
    }

    double loss_rate() const {
        if (mask_.empty()) return 0.0;
        return 1.0 - static_cast<double>(present_count()) / static_cast<double>(mask_.size());
    }

    bool gap_free() const { return present_count() == mask_.size(); }

    double duration_s() const { return static_cast<double>(size()) / rate_hz_; }

    /// All six channel values finite on present slots, positive rate.
    void validate(const std::string& context) const {
        if (rate_hz_ <= 0.0) throw DataError(context + ": non-positive sampling rate");
        if (start_ms_ < 0) throw DataError(context + ": negative start timestamp");
        for (std::size_t i = 0; i < size(); ++i) {
            if (!present(i)) continue;
            for (int c = 0; c < kNumChannels; ++c) {
                if (!std::isfinite(ch_[c][i]))
                    throw DataError(context + ": non-finite value at slot " + std::to_string(i));
            }
        }
    }

    ImuSeries slice(std::size_t begin, std::size_t count) const {
        ImuSeries out(rate_hz_, slot_time_ms(begin), count);
        for (std::size_t i = 0; i < count; ++i) {
            out.mask_[i] = mask_[begin + i];
            for (int c = 0; c < kNumChannels; ++c) out.ch_[c][i] = ch_[c][begin + i];
        }
        return out;
    }

private:
    double rate_hz_ = kDefaultRateHz;
    int64_t start_ms_ = 0;
    std::array<std::vector<double>, kNumChannels> ch_;
    std::vector<uint8_t> mask_;
};

/// Beat anchors detected on a single-channel series, with the extraction
/// extents used when pulling per-beat segments around each anchor.
struct BeatSegmentation {
    std::vector<std::size_t> peak_indices; // ascending slot indices
    double window_pre_ms = 250.0;
    double window_post_ms = 450.0;

    std::size_t size() const { return peak_indices.size(); }
    bool empty() const { return peak_indices.empty(); }
};

} // namespace earcardio
