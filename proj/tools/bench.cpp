// Compares the OpenMP kernels against the serial reference path on the hot
// loops: SWT denoising, Welch PSD batches, and mini-batch gradient evaluation.
// Both paths produce bit-identical results; this only measures throughput.

#include <chrono>
#include <cstdio>
#include <vector>

#include "earcardio/dsp/swt.hpp"
#include "earcardio/dsp/welch.hpp"
#include "earcardio/nn/train.hpp"
#include "earcardio/util/parallel.hpp"
#include "earcardio/util/rng.hpp"

using namespace earcardio;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(void (*fn)(int), int reps) {
    auto t0 = Clock::now();
    fn(reps);
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

ImuSeries random_series(std::size_t n, uint64_t seed) {
    Rng rng(seed);
    ImuSeries s(25.0, 0, n);
    for (int c = 0; c < kNumChannels; ++c)
        for (auto& v : s.channel(c)) v = rng.normal();
    return s;
}

void bench_swt(int reps) {
    auto s = random_series(1500, 1);
    double sink = 0.0;
    for (int r = 0; r < reps; ++r) {
        auto d = dsp::swt_denoise_series(s);
        sink += d.value(0, 0);
    }
    if (sink == 42.0) std::printf("!");
}

void bench_welch(int reps) {
    Rng rng(2);
    std::vector<std::vector<double>> signals(64);
    for (auto& x : signals) {
        x.resize(500);
        for (auto& v : x) v = rng.normal();
    }
    for (int r = 0; r < reps; ++r) {
        std::vector<double> out(signals.size());
        par::parallel_for(signals.size(), [&](std::size_t i) {
            auto psd = dsp::welch_psd(signals[i], 100.0);
            out[i] = psd.power[3];
        });
        if (out[0] == 42.0) std::printf("!");
    }
}

void bench_train(int reps) {
    nn::DenoiserConfig dc;
    nn::DenoiserModel model(dc);
    Rng rng(3);
    std::vector<nn::DenoiserSample> corpus;
    for (int i = 0; i < 32; ++i) {
        nn::DenoiserSample s;
        s.input.window = nn::Tensor({kNumChannels, nn::kWindowLen});
        for (auto& v : s.input.window.data) v = rng.normal();
        s.input.mask.assign(nn::kWindowLen, 1.0);
        s.target = s.input.window;
        corpus.push_back(std::move(s));
    }
    nn::TrainConfig tc;
    tc.epochs = reps;
    tc.batch = 16;
    nn::train_denoiser(model, corpus, tc);
}

struct Case {
    const char* name;
    void (*fn)(int);
    int reps;
};

} // namespace

int main() {
    const Case cases[] = {
        {"swt_denoise_series (60 s trace)", bench_swt, 50},
        {"welch_psd batch (64 x 500)", bench_welch, 20},
        {"denoiser train epoch (32 windows)", bench_train, 3},
    };
    std::printf("%-36s %12s %12s %8s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup");
    for (const auto& c : cases) {
        par::set_parallel(false);
        double serial = time_ms(c.fn, c.reps);
        par::set_parallel(true);
        double parallel = time_ms(c.fn, c.reps);
        std::printf("%-36s %12.1f %12.1f %7.2fx\n", c.name, serial, parallel, serial / parallel);
    }
    return 0;
}
