#pragma once

#include <string>
#include <vector>

#include "earcardio/core/series.hpp"

namespace earcardio::dsp {

/// Orthonormal analysis filter pair (lowpass/highpass), sum(lo) = sqrt(2).
struct Wavelet {
    std::vector<double> lo;
    std::vector<double> hi;
    std::string name;

    static Wavelet db2(); // 4-tap Daubechies
};

/// Undecimated (a-trous) wavelet decomposition of one channel.
///
/// The transform runs on a mirror-doubled copy of the input so the boundary
/// extension is symmetric while the periodized filter bank keeps exact perfect
/// reconstruction. Coefficient sequences exposed through detail()/approx()
/// cover the original support, one coefficient per input sample; the doubled
/// halves are retained internally for inversion.
class SwtDecomposition {
public:
    int n_levels() const { return static_cast<int>(details_.size()); }
    int split_level() const { return split_j_; }
    double fs_hz() const { return fs_hz_; }
    std::size_t input_len() const { return orig_len_; }

    /// Detail coefficients D_level, level in [1, N]; length == input length.
    std::vector<double> detail(int level) const;
    /// Level-N approximation; length == input length.
    std::vector<double> approx() const;

    // internals (doubled length), used by the inverse transform and tests
    const std::vector<std::vector<double>>& details_ext() const { return details_; }
    const std::vector<double>& approx_ext() const { return approx_; }

    friend SwtDecomposition swt_decompose(const std::vector<double>&, int, const Wavelet&, double, int);
    friend std::vector<double> iswt(const SwtDecomposition&, bool);

private:
    std::vector<std::vector<double>> details_; // [level-1], each length 2*orig_len
    std::vector<double> approx_;
    std::size_t orig_len_ = 0;
    int split_j_ = 2;
    double fs_hz_ = 25.0;
    Wavelet wavelet_;
};

inline constexpr int kSwtDefaultLevels = 5; // N
inline constexpr int kSwtDefaultSplit = 2;  // J: D_1..D_J carry the cardiac band

/// Decompose one gap-free channel into N detail levels plus the level-N
/// approximation. Throws DataError when the level-N filter no longer fits in
/// the signal.
SwtDecomposition swt_decompose(const std::vector<double>& x, int n_levels = kSwtDefaultLevels,
                               const Wavelet& wavelet = Wavelet::db2(), double fs_hz = 25.0,
                               int split_j = kSwtDefaultSplit);

/// Inverse transform. cardiac_only keeps D_1..D_J and zeroes the motion band
/// (D_{J+1}..D_N and the approximation); the full-band inverse reproduces the
/// input to float precision.
std::vector<double> iswt(const SwtDecomposition& dec, bool cardiac_only);

inline std::vector<double> iswt_full(const SwtDecomposition& dec) { return iswt(dec, false); }

/// Keep the sub-bands above fs/2^(J+1) (3.125 Hz at 25 Hz, N=5, J=2); this is
/// the first denoising stage that strips slow motion content.
inline std::vector<double> swt_cardiac_reconstruct(const SwtDecomposition& dec) {
    return iswt(dec, true);
}

/// Apply decompose + cardiac reconstruct to each axis independently.
/// Axes are processed in parallel; results do not depend on thread count.
ImuSeries swt_denoise_series(const ImuSeries& series, int n_levels = kSwtDefaultLevels,
                             int split_j = kSwtDefaultSplit);

/// Single-channel convenience wrapper.
std::vector<double> swt_denoise_channel(const std::vector<double>& x, double fs_hz,
                                        int n_levels = kSwtDefaultLevels,
                                        int split_j = kSwtDefaultSplit);

/// Debug dump of the coefficient stack as CSV (one column per sub-band).
void swt_dump_csv(const SwtDecomposition& dec, const std::string& path);

} // namespace earcardio::dsp
