#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "earcardio/core/csv.hpp"
#include "earcardio/core/interp.hpp"
#include "earcardio/util/rng.hpp"

using namespace earcardio;

namespace {

ImuSeries make_series(std::size_t n, double rate = 25.0) {
    ImuSeries s(rate, 0, n);
    Rng rng(99);
    for (int c = 0; c < kNumChannels; ++c)
        for (auto& v : s.channel(c)) v = rng.normal();
    return s;
}

} // namespace

TEST_CASE("slot clock uses round-half-up from the nominal rate") {
    ImuSeries s(25.0, 100, 5);
    CHECK(s.slot_time_ms(0) == 100);
    CHECK(s.slot_time_ms(1) == 140);
    CHECK(s.slot_time_ms(4) == 260);
    // a non-integer interval still lands on the rounded grid
    ImuSeries odd(30.0, 0, 4);
    CHECK(odd.slot_time_ms(1) == 33);  // 33.33 -> 33
    CHECK(odd.slot_time_ms(2) == 67);  // 66.67 -> 67
}

TEST_CASE("linear_interpolate fills the midpoint of a single gap") {
    ImuSeries s(25.0, 0, 3);
    for (int c = 0; c < kNumChannels; ++c) {
        s.set_value(c, 0, 0.0);
        s.set_value(c, 2, 2.0);
    }
    s.set_present(1, false);
    auto out = linear_interpolate(s);
    CHECK(out.gap_free());
    for (int c = 0; c < kNumChannels; ++c) CHECK(out.value(c, 1) == doctest::Approx(1.0));
}

TEST_CASE("linear_interpolate is the identity on complete series") {
    auto s = make_series(64);
    auto out = linear_interpolate(s);
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(out.value(c, i) == s.value(c, i));
}

TEST_CASE("linear_interpolate ramps across a two-slot gap") {
    // mask 1,0,0,1 with endpoints 0 and 3 -> interior 1 and 2
    ImuSeries s(25.0, 0, 4);
    for (int c = 0; c < kNumChannels; ++c) {
        s.set_value(c, 0, 0.0);
        s.set_value(c, 3, 3.0);
    }
    s.set_present(1, false);
    s.set_present(2, false);
    auto out = linear_interpolate(s);
    for (int c = 0; c < kNumChannels; ++c) {
        CHECK(out.value(c, 1) == doctest::Approx(1.0));
        CHECK(out.value(c, 2) == doctest::Approx(2.0));
    }
}

TEST_CASE("linear_interpolate holds the nearest value at lost edges") {
    ImuSeries s(25.0, 0, 4);
    for (int c = 0; c < kNumChannels; ++c) {
        s.set_value(c, 1, 5.0);
        s.set_value(c, 2, 7.0);
    }
    s.set_present(0, false);
    s.set_present(3, false);
    auto out = linear_interpolate(s);
    CHECK(out.value(0, 0) == 5.0);
    CHECK(out.value(0, 3) == 7.0);
}

TEST_CASE("linear_interpolate rejects series with fewer than 2 present slots") {
    ImuSeries s(25.0, 0, 4);
    for (std::size_t i = 0; i < 4; ++i) s.set_present(i, i == 1);
    CHECK_THROWS_AS(linear_interpolate(s), DataError);
}

TEST_CASE("linear_interpolate is idempotent bit-exactly") {
    auto s = make_series(128);
    Rng rng(5);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (rng.uniform01() < 0.3) s.set_present(i, false);
    if (s.present_count() < 2) return;
    auto once = linear_interpolate(s);
    auto twice = linear_interpolate(once);
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(once.value(c, i) == twice.value(c, i));
}

TEST_CASE("mask and slot presence stay consistent through interpolation") {
    auto s = make_series(64);
    s.set_present(10, false);
    s.set_present(11, false);
    auto out = linear_interpolate(s);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.present(i));
    CHECK(out.mask().size() == out.size());
}

TEST_CASE("trace CSV round-trips bit-exactly, gaps encoded by absent rows") {
    auto s = make_series(50);
    s.set_present(7, false);
    s.set_present(8, false);
    s.set_present(31, false);
    auto path = std::filesystem::temp_directory_path() / "earcardio_trace_test.csv";
    write_trace_csv(path.string(), s);
    auto back = read_trace_csv(path.string(), 25.0);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back.present(i) == s.present(i));
        if (s.present(i))
            for (int c = 0; c < kNumChannels; ++c) CHECK(back.value(c, i) == s.value(c, i));
    }
    std::filesystem::remove(path);
}

TEST_CASE("trace CSV rejects duplicate timestamps with the row number") {
    auto path = std::filesystem::temp_directory_path() / "earcardio_dup_test.csv";
    {
        std::ofstream f(path);
        f << "t_ms,ax,ay,az,gx,gy,gz\n";
        f << "0,1,1,1,1,1,1\n";
        f << "40,1,1,1,1,1,1\n";
        f << "40,2,2,2,2,2,2\n";
    }
    try {
        read_trace_csv(path.string(), 25.0);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 4") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("trace CSV rejects malformed numeric fields") {
    auto path = std::filesystem::temp_directory_path() / "earcardio_bad_test.csv";
    {
        std::ofstream f(path);
        f << "t_ms,ax,ay,az,gx,gy,gz\n";
        f << "0,1,abc,1,1,1,1\n";
    }
    CHECK_THROWS_AS(read_trace_csv(path.string(), 25.0), DataError);
    std::filesystem::remove(path);
}
