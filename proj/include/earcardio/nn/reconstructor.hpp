#pragma once

#include <cstdint>
#include <string>

#include "earcardio/nn/ops.hpp"

namespace earcardio::nn {

inline constexpr int kUpsampleFactor = 4;  // 25 Hz -> 100 Hz
inline constexpr int kScgWindowLen = 500;  // 4 x 125

/// Reconstructed single-channel cardiogram for one window.
struct ScgWaveform {
    double rate_hz = 100.0;
    std::vector<double> samples;
    std::vector<std::size_t> beat_annotations;
};

/// Peak-emphasis weights of the cardiac-focused loss:
/// w(t) = 1 + alpha * 1[|t - nearest peak| <= delta].
struct RegionWeights {
    double alpha = 4.0;
    double delta_ms = 50.0;
};

std::vector<double> region_weight_vector(std::size_t n, const std::vector<std::size_t>& peaks,
                                         const RegionWeights& w, double rate_hz);

/// Mean over t of w(t) * (pred - target)^2. With alpha = 0 this is exactly MSE.
double region_focused_loss(const std::vector<double>& pred, const std::vector<double>& target,
                           const RegionWeights& w, const std::vector<std::size_t>& target_peaks,
                           double rate_hz = 100.0);

/// Replaceable final layer. "waveform" maps per-step features to out_dim
/// channels at the upsampled rate; "pooled" mean-pools over time and applies
/// one linear map (used by downstream few-shot tasks).
struct TaskHeadSpec {
    std::string task = "scg";
    std::string kind = "waveform"; // waveform | pooled
    int out_dim = 1;
};

struct ReconstructorConfig {
    int feat_ch = 32;
    int n_blocks = 2;
    int heads = 4;
    int ffn_dim = 64;
    int up_ch = 16;
    int kernel = 5;
    uint64_t seed = 2;
};

/// BCG -> SCG super-resolution network: conv feature extraction, self-attention
/// blocks over time (sinusoidal positions), a learned 4x sub-slot upsampler
/// (pixel shuffle - output step 4t+j comes from input step t, so beat timing
/// cannot warp), and the task head.
class ReconstructorModel {
public:
    explicit ReconstructorModel(const ReconstructorConfig& cfg = {},
                                const TaskHeadSpec& head = {});

    const ReconstructorConfig& config() const { return cfg_; }
    const TaskHeadSpec& head_spec() const { return head_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    std::size_t head_start_offset() const { return head_start_; }

    struct BlockActs {
        LayerNorm::Cache ln1, ln2;
        Mha::Cache attn;
        Linear::Cache ffn1, ffn2;
        Gelu::Cache g;
        Tensor h_in, h_mid; // residual taps
    };
    struct Acts {
        Conv1d::Cache f0, f1;
        Gelu::Cache g0, g1;
        std::vector<BlockActs> blocks;
        Tensor h_seq;  // [T, D] after blocks
        Conv1d::Cache up;
        Gelu::Cache g_up;
        Tensor up_feat; // [up_ch, 4T]
        Conv1d::Cache head_conv;
        Linear::Cache head_lin;
        std::vector<double> pooled;
        int t_len = 0;
    };

    /// [6, T] -> [out_dim, 4T] (waveform head) or [1, out_dim] (pooled head).
    Tensor forward(const Tensor& window, Acts& acts) const;
    void backward(const Acts& acts, const Tensor& dout, GradBuf& g) const;

    /// Drop the current head, register + initialize a fresh one. Everything
    /// before head_start_offset() is untouched.
    void swap_head(const TaskHeadSpec& new_head, uint64_t head_seed);

    std::size_t param_count() const { return params_.size(); }

private:
    void register_head();

    ReconstructorConfig cfg_;
    TaskHeadSpec head_;
    ParamStore params_;
    Conv1d f0_, f1_;
    struct Block {
        LayerNorm ln1, ln2;
        Mha attn;
        Linear ffn1, ffn2;
    };
    std::vector<Block> blocks_;
    Conv1d up_conv_;
    PixelShuffle1d shuffle_;
    Gelu gelu_;
    std::size_t head_start_ = 0;
    Conv1d head_conv_;
    Linear head_lin_;
};

/// Run one window through the model and annotate beats on the output.
ScgWaveform reconstruct_window(const ReconstructorModel& model, const Tensor& window);

} // namespace earcardio::nn
