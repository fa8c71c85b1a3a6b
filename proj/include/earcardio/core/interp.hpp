#pragma once

#include "earcardio/core/series.hpp"

namespace earcardio {

/// Fill missing slots per channel by linear interpolation between the nearest
/// present neighbors. Leading/trailing gaps are filled by nearest-value hold.
/// Present slots pass through bit-exactly; the result has an all-ones mask.
/// Throws DataError when fewer than 2 slots are present.
ImuSeries linear_interpolate(const ImuSeries& series);

/// Band-limited resampling (windowed-sinc, Hann window, 16-tap half-width).
/// Input must be gap-free; output slot count is round(duration * target_rate).
/// The kernel is normalized per output sample, so DC is preserved exactly and
/// resampling at the input rate is the identity.
ImuSeries resample(const ImuSeries& series, double target_rate_hz);

/// Single-channel resample used for SCG reference tracks.
std::vector<double> resample_channel(const std::vector<double>& x, double rate_hz,
                                     double target_rate_hz);

} // namespace earcardio
