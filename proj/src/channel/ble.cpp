#include "earcardio/channel/ble.hpp"

#include <cmath>

#include "earcardio/util/rng.hpp"

namespace earcardio {

LossScenario LossScenario::preset(const std::string& tag) {
    LossScenario s;
    s.tag = tag;
    if (tag == "music") {
        s.iid_loss_p = 0.05;
    } else if (tag == "anc") {
        s.iid_loss_p = 0.10;
        s.burst_enabled = true;
        s.burst_enter_p = 0.01;
        s.burst_len_mean = 3.0;
    } else if (tag == "trans") {
        s.iid_loss_p = 0.15;
        s.burst_enabled = true;
        s.burst_enter_p = 0.012;
        s.burst_len_mean = 3.0;
    } else if (tag == "near_5m") {
        s.iid_loss_p = 0.02;
    } else if (tag == "far_15m_wall") {
        s.iid_loss_p = 0.32;
        s.burst_enabled = true;
        s.burst_enter_p = 0.02;
        s.burst_len_mean = 3.0;
    } else if (tag == "lossless" || tag == "custom") {
        s.iid_loss_p = 0.0;
    } else {
        throw ConfigError("unknown channel scenario '" + tag + "'");
    }
    return s;
}

void LossScenario::validate() const {
    if (iid_loss_p < 0.0 || iid_loss_p > 1.0) throw ConfigError("LossScenario: iid_loss_p outside [0,1]");
    if (burst_enabled) {
        if (burst_enter_p < 0.0 || burst_enter_p > 1.0)
            throw ConfigError("LossScenario: burst_enter_p outside [0,1]");
        if (burst_len_mean < 1.0) throw ConfigError("LossScenario: burst_len_mean must be >= 1");
    }
}

void PacketTrace::validate() const {
    if (nominal_interval_ms <= 0) throw DataError("PacketTrace: non-positive nominal interval");
    for (std::size_t i = 1; i < packets.size(); ++i) {
        int64_t gap = packets[i].t_ms - packets[i - 1].t_ms;
        if (gap <= 0) throw DataError("PacketTrace: timestamps not strictly increasing");
        if (gap % nominal_interval_ms != 0)
            throw DataError("PacketTrace: inter-arrival " + std::to_string(gap) +
                            " ms is not a multiple of " + std::to_string(nominal_interval_ms) + " ms");
    }
}

TransmitResult transmit(const ImuSeries& series, const LossScenario& scenario, uint64_t seed) {
    scenario.validate();
    if (!series.gap_free()) throw DataError("transmit: input series must be gap-free");
    const double interval = 1000.0 / series.rate_hz();
    if (std::abs(interval - std::floor(interval + 0.5)) > 1e-9)
        throw DataError("transmit: rate must map to an integer millisecond interval");

    TransmitResult res;
    res.trace.nominal_interval_ms = static_cast<int64_t>(std::floor(interval + 0.5));
    res.input_start_ms = series.start_ms();
    res.input_slots = series.size();
    res.sent_mask.assign(series.size(), 1);

    Rng rng(seed);
    bool in_burst = false;
    const double burst_exit_p = scenario.burst_enabled ? 1.0 / scenario.burst_len_mean : 1.0;

    for (std::size_t i = 0; i < series.size(); ++i) {
        if (scenario.burst_enabled) {
            if (in_burst) {
                if (rng.uniform01() < burst_exit_p) in_burst = false;
            } else {
                if (rng.uniform01() < scenario.burst_enter_p) in_burst = true;
            }
        }
        // one uniform draw per slot regardless of burst state keeps the
        // iid stream aligned across scenario variants with the same seed
        const bool iid_drop = rng.uniform01() < scenario.iid_loss_p;
        const bool dropped = iid_drop || in_burst;
        if (dropped) {
            res.sent_mask[i] = 0;
            continue;
        }
        PacketTrace::Packet p;
        p.t_ms = series.slot_time_ms(i);
        for (int c = 0; c < kNumChannels; ++c) p.values[c] = series.value(c, i);
        res.trace.packets.push_back(p);
    }
    return res;
}

std::pair<ImuSeries, LossReport> extract_missing_pattern(const PacketTrace& trace,
                                                         double nominal_rate_hz) {
    if (trace.packets.empty()) throw DataError("extract_missing_pattern: empty packet trace");
    trace.validate();

    const int64_t start = trace.packets.front().t_ms;
    const int64_t interval = trace.nominal_interval_ms;
    const int64_t span = trace.packets.back().t_ms - start;
    const auto n_slots = static_cast<std::size_t>(span / interval) + 1;

    ImuSeries series(nominal_rate_hz, start, n_slots);
    for (auto& b : series.mask()) b = 0;

    LossReport report;
    int64_t prev_t = -1;
    for (const auto& p : trace.packets) {
        const auto slot = static_cast<std::size_t>((p.t_ms - start) / interval);
        series.set_present(slot, true);
        for (int c = 0; c < kNumChannels; ++c) series.set_value(c, slot, p.values[c]);
        if (prev_t >= 0) {
            const int mult = static_cast<int>((p.t_ms - prev_t) / interval);
            report.gap_histogram[mult]++;
        }
        prev_t = p.t_ms;
    }
    // counting estimator: exact over the received span
    report.loss_rate = 1.0 - static_cast<double>(trace.packets.size()) / static_cast<double>(n_slots);
    report.fail_safe_triggered = LossReport::fail_safe(report.loss_rate);
    return {std::move(series), report};
}

namespace {

LossReport window_report(const ImuSeries& w) {
    LossReport r;
    r.loss_rate = w.loss_rate();
    r.fail_safe_triggered = LossReport::fail_safe(r.loss_rate);
    int run = 0;
    for (std::size_t i = 0; i <= w.size(); ++i) {
        if (i < w.size() && !w.present(i)) {
            ++run;
        } else if (run > 0) {
            r.gap_histogram[run + 1]++; // gap multiple includes the bounding arrivals
            run = 0;
        }
    }
    return r;
}

} // namespace

std::vector<ReplayWindow> series_windows(const ImuSeries& series, double window_s, double hop_s) {
    if (window_s < 1.0) throw ConfigError("replay_windows: window must be >= 1 s");
    if (hop_s <= 0.0 || hop_s > window_s)
        throw ConfigError("replay_windows: hop must be in (0, window]");

    const double rate = series.rate_hz();
    const auto win_slots = static_cast<std::size_t>(std::floor(window_s * rate + 0.5));
    std::vector<ReplayWindow> out;
    double t_s = 0.0;
    for (;;) {
        const auto start = static_cast<std::size_t>(std::floor(t_s * rate + 0.5));
        if (start + win_slots > series.size()) break;
        ReplayWindow rw;
        rw.start_slot = start;
        rw.window = series.slice(start, win_slots);
        rw.report = window_report(rw.window);
        rw.discard = rw.report.fail_safe_triggered;
        out.push_back(std::move(rw));
        t_s += hop_s;
    }
    return out;
}

std::vector<ReplayWindow> replay_windows(const PacketTrace& trace, double window_s, double hop_s,
                                         double nominal_rate_hz) {
    auto [series, report] = extract_missing_pattern(trace, nominal_rate_hz);
    (void)report;
    return series_windows(series, window_s, hop_s);
}

} // namespace earcardio
