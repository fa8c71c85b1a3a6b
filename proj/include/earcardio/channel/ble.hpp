#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "earcardio/core/series.hpp"

namespace earcardio {

// Per-window packet-loss threshold of the fail-safe: strictly above tau the
// window is too corrupted to refine and gets discarded.
inline constexpr double kFailSafeTau = 0.24;

/// Scenario-dependent loss model: an iid per-packet drop plus an optional
/// Gilbert-Elliott burst process standing in for supervision-timeout events.
struct LossScenario {
    std::string tag = "custom";
    double iid_loss_p = 0.0;
    bool burst_enabled = false;
    double burst_enter_p = 0.0;   // per-slot Good -> Bad
    double burst_len_mean = 3.0;  // mean slots spent in Bad (~120 ms)

    static LossScenario preset(const std::string& tag);
    void validate() const;
};

/// What the phone side receives: surviving timestamped samples. Inter-arrival
/// times are positive integer multiples of the nominal interval.
struct PacketTrace {
    struct Packet {
        int64_t t_ms;
        std::array<double, kNumChannels> values;
    };
    std::vector<Packet> packets;
    int64_t nominal_interval_ms = 40;

    void validate() const;
};

/// transmit() also returns the channel's internal drop record so tests can
/// check the recovered mask against it exactly.
struct TransmitResult {
    PacketTrace trace;
    std::vector<uint8_t> sent_mask; // 1 = survived, aligned with the input slots
    int64_t input_start_ms = 0;
    std::size_t input_slots = 0;
};

/// Loss bookkeeping recovered from timestamps.
struct LossReport {
    double loss_rate = 0.0;
    std::map<int, std::size_t> gap_histogram; // gap multiple -> count
    bool fail_safe_triggered = false;

    static bool fail_safe(double loss_rate) { return loss_rate > kFailSafeTau; }
};

/// Push a gap-free series through the lossy channel. Deterministic in seed.
TransmitResult transmit(const ImuSeries& series, const LossScenario& scenario, uint64_t seed);

/// Rebuild the slot grid from the received timestamps: first timestamp
/// anchors the grid, gaps become missing slots, and the loss rate is an exact
/// count over the received span. Throws DataError on gaps that are not
/// multiples of the nominal interval.
std::pair<ImuSeries, LossReport> extract_missing_pattern(const PacketTrace& trace,
                                                         double nominal_rate_hz = kDefaultRateHz);

/// One analysis window plus its local loss report.
struct ReplayWindow {
    ImuSeries window;
    LossReport report;
    std::size_t start_slot = 0;
    bool discard = false; // fail-safe fired on this window
};

/// Sliding windows over the reconstructed stream, each with its own loss
/// report; windows whose local loss exceeds tau are tagged discard.
std::vector<ReplayWindow> replay_windows(const PacketTrace& trace, double window_s = 5.0,
                                         double hop_s = 5.0,
                                         double nominal_rate_hz = kDefaultRateHz);

/// Same windowing applied directly to an already-reconstructed series.
std::vector<ReplayWindow> series_windows(const ImuSeries& series, double window_s = 5.0,
                                         double hop_s = 5.0);

} // namespace earcardio
