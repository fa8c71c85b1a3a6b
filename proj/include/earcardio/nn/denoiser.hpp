#pragma once

#include <cstdint>

#include "earcardio/core/series.hpp"
#include "earcardio/nn/ops.hpp"

namespace earcardio::nn {

inline constexpr int kWindowLen = 125; // 5 s at 25 Hz

/// One model window: 6 x T signal block plus the binary missing mask as a
/// supplementary positional channel.
struct EnhancerInput {
    Tensor window;              // [6, T]
    std::vector<double> mask;   // length T, values 0/1

    /// Production contract: exactly 125 steps, binary mask, finite values.
    void validate() const;
};

struct DenoiserConfig {
    int attn_dim = 16;
    int attn_heads = 4;
    int enc1_ch = 24;
    int enc2_ch = 48;
    int kernel = 5;
    uint64_t seed = 1;
};

/// Channel-attention denoising autoencoder. Per-timestep multi-head attention
/// fuses the 6 axes (with the mask token as extra key/value context), then a
/// strided conv encoder, bottleneck and mirrored skip-connected decoder map
/// the refined window to the clean estimate. Forward is a pure function of
/// (weights, input).
class DenoiserModel {
public:
    explicit DenoiserModel(const DenoiserConfig& cfg = {});

    const DenoiserConfig& config() const { return cfg_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    struct Acts {
        Tensor embed;                 // [T, 7, D]
        Mha::Cache attn;
        Tensor attn_out;              // [T, 6, D]
        Tensor x1;                    // refined input, [6, T]
        Conv1d::Cache enc1, enc2, bott, dec1, dec2, out;
        Gelu::Cache g_e1, g_e2, g_b, g_d1, g_d2;
        Tensor c1g, x_in;
        std::vector<double> mask_in;
        int t_len = 0;
    };

    /// [6, T] -> [6, T]. Throws TrainingError on non-finite input or output.
    Tensor forward(const EnhancerInput& in, Acts& acts) const;

    /// Accumulates parameter gradients for dLoss/dOutput into g.
    void backward(const Acts& acts, const Tensor& dout, GradBuf& g) const;

    std::size_t param_count() const { return params_.size(); }

private:
    DenoiserConfig cfg_;
    ParamStore params_;
    // channel attention
    std::size_t emb_w_off_ = 0, emb_b_off_ = 0;
    Mha attn_;
    std::size_t proj_w_off_ = 0, proj_b_off_ = 0;
    // autoencoder
    Conv1d enc1_, enc2_, bott_, dec1_, dec2_, out_;
    Gelu gelu_;
    Upsample2x up_;
};

/// Beat-ensemble refinement: per channel, align beats on their anchors, take
/// the per-phase median over mask-present samples only, and write the template
/// into masked-out samples. Present samples pass through bit-exactly.
struct EnsembleResult {
    Tensor window;
    bool degraded = false; // fewer than 2 beats, input returned unchanged
};
EnsembleResult ensemble_refine(const EnhancerInput& in, const BeatSegmentation& beats,
                               double rate_hz = kDefaultRateHz);

/// Channel with the strongest 1-10 Hz content; used to pick the beat-anchor
/// axis of a window.
int rank_best_channel(const Tensor& window, double rate_hz = kDefaultRateHz);

} // namespace earcardio::nn
