#pragma once

#include <string>

#include "earcardio/core/series.hpp"

namespace earcardio {

// IMU trace CSV: header `t_ms,ax,ay,az,gx,gy,gz`, one row per RECEIVED sample.
// Gaps are encoded by absent timestamps, never by blank fields. This is the
// interchange format between every stage and the CLI.

/// Write only the present slots of a series. %.17g formatting keeps the
/// write-then-read round trip bit-exact.
void write_trace_csv(const std::string& path, const ImuSeries& series);

/// Read a trace CSV onto a uniform slot grid. The grid is anchored at the
/// first row's timestamp with the given nominal rate; rows must land exactly
/// on grid slots. Malformed rows, non-monotonic or duplicated timestamps and
/// non-finite values raise DataError naming the offending row.
ImuSeries read_trace_csv(const std::string& path, double nominal_rate_hz = kDefaultRateHz);

/// Single-channel waveform CSV with header `t_ms,<name>`.
void write_waveform_csv(const std::string& path, const std::vector<double>& samples,
                        double rate_hz, int64_t start_ms, const std::string& name);

std::vector<double> read_waveform_csv(const std::string& path);

} // namespace earcardio
