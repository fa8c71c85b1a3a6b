#pragma once

#include <vector>

#include "earcardio/core/series.hpp"

namespace earcardio {

/// Adaptive-threshold beat detector on a single gap-free channel.
///
/// Envelope = |1-10 Hz bandpassed signal|; threshold = 0.5 x rolling 3 s 90th
/// percentile of the envelope. Local envelope maxima above threshold are
/// accepted greedily by amplitude under a refractory period of
/// 60000/max_bpm ms. An empty segmentation is a valid result.
BeatSegmentation segment_beats(const std::vector<double>& channel, double rate_hz,
                               double min_bpm = 30.0, double max_bpm = 220.0);

/// Inter-beat intervals in ms from consecutive anchors.
std::vector<double> ibis_from_peaks(const std::vector<std::size_t>& peaks, double rate_hz);

} // namespace earcardio
