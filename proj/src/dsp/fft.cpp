#include "earcardio/dsp/fft.hpp"

#include <cmath>

namespace earcardio::dsp {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
} // namespace

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

namespace {

// Bluestein chirp-z transform: DFT of arbitrary length via pow2 convolution
std::vector<std::complex<double>> bluestein(const std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the chirp argument small for long signals
        double ang = kPi * static_cast<double>((k * k) % (2 * n)) / static_cast<double>(n);
        w[k] = std::complex<double>(std::cos(ang), sign * std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> a(m, {0.0, 0.0}), b(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
    for (std::size_t k = 0; k < n; ++k) {
        b[k] = std::conj(w[k]);
        if (k != 0) b[m - k] = std::conj(w[k]);
    }
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);
    std::vector<std::complex<double>> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = a[k] * w[k];
    if (inverse) {
        for (auto& z : y) z /= static_cast<double>(n);
    }
    return y;
}

} // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x, bool inverse) {
    if (x.size() <= 1) return x;
    if (is_pow2(x.size())) {
        auto a = x;
        fft_pow2(a, inverse);
        return a;
    }
    return bluestein(x, inverse);
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = {x[i], 0.0};
    return fft(c, false);
}

std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum) {
    auto c = fft(spectrum, true);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

std::vector<double> brickwall_bandpass(const std::vector<double>& x, double rate_hz,
                                       double lo_hz, double hi_hz) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    auto spec = fft_real(x);
    for (std::size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) * rate_hz / static_cast<double>(n);
        if (f > rate_hz / 2.0) f = rate_hz - f; // negative-frequency mirror
        if (f < lo_hz || f > hi_hz) spec[k] = {0.0, 0.0};
    }
    return ifft_real(spec);
}

} // namespace earcardio::dsp
