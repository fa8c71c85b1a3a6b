#pragma once

#include <complex>
#include <vector>

namespace earcardio::dsp {

/// In-place radix-2 FFT; size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// DFT of arbitrary length (radix-2 when possible, Bluestein otherwise).
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x, bool inverse = false);

/// Forward DFT of a real signal, full-length complex output.
std::vector<std::complex<double>> fft_real(const std::vector<double>& x);

/// Inverse of fft_real; returns the real part (imaginary residue dropped).
std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum);

/// Zero-phase brick-wall bandpass: keeps DFT bins whose |frequency| lies in
/// [lo_hz, hi_hz], zeroes everything else, inverse transforms.
std::vector<double> brickwall_bandpass(const std::vector<double>& x, double rate_hz,
                                       double lo_hz, double hi_hz);

} // namespace earcardio::dsp
