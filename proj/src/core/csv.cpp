#include "earcardio/core/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace earcardio {

namespace {

std::string format_row(int64_t t_ms, const double* vals, int n) {
    char buf[512];
    int off = std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(t_ms));
    for (int c = 0; c < n; ++c)
        off += std::snprintf(buf + off, sizeof(buf) - off, ",%.17g", vals[c]);
    buf[off] = '\0';
    return std::string(buf);
}

double parse_double(const std::string& field, std::size_t row, const std::string& path) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing garbage");
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(row) + ": bad numeric field '" + field + "'");
    }
}

} // namespace

void write_trace_csv(const std::string& path, const ImuSeries& series) {
    std::ofstream f(path);
    if (!f) throw DataError("write_trace_csv: cannot open " + path);
    f << "t_ms,ax,ay,az,gx,gy,gz\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.present(i)) continue;
        double vals[kNumChannels];
        for (int c = 0; c < kNumChannels; ++c) vals[c] = series.value(c, i);
        f << format_row(series.slot_time_ms(i), vals, kNumChannels) << "\n";
    }
}

ImuSeries read_trace_csv(const std::string& path, double nominal_rate_hz) {
    std::ifstream f(path);
    if (!f) throw DataError("read_trace_csv: cannot open " + path);

    std::string line;
    if (!std::getline(f, line)) throw DataError(path + ": empty file");
    if (line.rfind("t_ms", 0) != 0)
        throw DataError(path + ": missing header row (expected t_ms,ax,ay,az,gx,gy,gz)");

    struct Row {
        int64_t t_ms;
        double v[kNumChannels];
    };
    std::vector<Row> rows;
    std::size_t row_no = 1;
    while (std::getline(f, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 1 + kNumChannels)
            throw DataError(path + ": row " + std::to_string(row_no) + ": expected 7 fields, got " +
                            std::to_string(fields.size()));
        Row r{};
        try {
            r.t_ms = std::stoll(fields[0]);
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(row_no) + ": bad timestamp '" + fields[0] + "'");
        }
        if (r.t_ms < 0)
            throw DataError(path + ": row " + std::to_string(row_no) + ": negative timestamp");
        for (int c = 0; c < kNumChannels; ++c) {
            r.v[c] = parse_double(fields[1 + c], row_no, path);
            if (!std::isfinite(r.v[c]))
                throw DataError(path + ": row " + std::to_string(row_no) + ": non-finite value");
        }
        if (!rows.empty() && r.t_ms <= rows.back().t_ms)
            throw DataError(path + ": row " + std::to_string(row_no) +
                            ": non-monotonic timestamp " + std::to_string(r.t_ms));
        rows.push_back(r);
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    // map timestamps onto the nominal slot grid anchored at the first row
    const int64_t start = rows.front().t_ms;
    const double slot_ms = 1000.0 / nominal_rate_hz;
    std::size_t n_slots =
        static_cast<std::size_t>(std::floor(static_cast<double>(rows.back().t_ms - start) / slot_ms + 0.5)) + 1;

    ImuSeries series(nominal_rate_hz, start, n_slots);
    for (auto& b : series.mask()) b = 0;
    std::size_t row_idx = 1;
    for (const auto& r : rows) {
        ++row_idx;
        double rel = static_cast<double>(r.t_ms - start) / slot_ms;
        auto slot = static_cast<std::size_t>(std::floor(rel + 0.5));
        if (std::abs(rel - static_cast<double>(slot)) > 0.25)
            throw DataError(path + ": timestamp " + std::to_string(r.t_ms) +
                            " does not sit on the " + std::to_string(slot_ms) + " ms slot grid");
        series.set_present(slot, true);
        for (int c = 0; c < kNumChannels; ++c) series.set_value(c, slot, r.v[c]);
    }
    return series;
}

void write_waveform_csv(const std::string& path, const std::vector<double>& samples,
                        double rate_hz, int64_t start_ms, const std::string& name) {
    std::ofstream f(path);
    if (!f) throw DataError("write_waveform_csv: cannot open " + path);
    f << "t_ms," << name << "\n";
    char buf[128];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto t = start_ms + static_cast<int64_t>(std::floor(static_cast<double>(i) * 1000.0 / rate_hz + 0.5));
        std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(t), samples[i]);
        f << buf;
    }
}

std::vector<double> read_waveform_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("read_waveform_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError(path + ": empty file");
    std::vector<double> out;
    std::size_t row_no = 1;
    while (std::getline(f, line)) {
        ++row_no;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path + ": row " + std::to_string(row_no) + ": expected 2 fields");
        out.push_back(parse_double(line.substr(comma + 1), row_no, path));
    }
    return out;
}

} // namespace earcardio
