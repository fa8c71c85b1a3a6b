#pragma once

#include "earcardio/nn/params.hpp"
#include "earcardio/nn/tensor.hpp"

namespace earcardio::nn {

// Layer primitives with explicit forward/backward passes. Each layer owns
// offsets into a ParamStore; per-sample activations live in the caller's
// cache structs so one model instance can run on several threads at once.
// Backward passes accumulate parameter gradients into a flat buffer the size
// of the store and return the input gradient.

using GradBuf = std::vector<double>;

struct Linear {
    int in_dim = 0, out_dim = 0;
    std::size_t w_off = 0, b_off = 0;

    void init(ParamStore& p, const std::string& name, int in, int out);
    struct Cache {
        Tensor x;
    };
    // x: [M, in_dim] -> [M, out_dim]
    Tensor fw(const ParamStore& p, const Tensor& x, Cache& c) const;
    Tensor bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const;
};

struct Conv1d {
    int in_ch = 0, out_ch = 0, kernel = 1, stride = 1, pad = 0;
    std::size_t w_off = 0, b_off = 0;

    void init(ParamStore& p, const std::string& name, int in, int out, int k, int s, int padding);
    int out_len(int t) const { return (t + 2 * pad - kernel) / stride + 1; }
    struct Cache {
        Tensor x;
    };
    // x: [in_ch, T] -> [out_ch, out_len(T)]
    Tensor fw(const ParamStore& p, const Tensor& x, Cache& c) const;
    Tensor bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const;
};

struct Gelu {
    struct Cache {
        Tensor x;
    };
    Tensor fw(const Tensor& x, Cache& c) const;
    Tensor bw(const Cache& c, const Tensor& dy) const;
};

struct LayerNorm {
    int dim = 0;
    std::size_t gamma_off = 0, beta_off = 0;

    void init(ParamStore& p, const std::string& name, int d);
    struct Cache {
        Tensor xhat;         // normalized rows
        std::vector<double> rstd;
    };
    // x: [M, dim], normalized per row
    Tensor fw(const ParamStore& p, const Tensor& x, Cache& c) const;
    Tensor bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const;
};

/// Multi-head attention over token sets; queries may attend to a larger
/// key/value set (the denoiser adds the missing mask as context this way).
struct Mha {
    int dim = 0, heads = 0;
    std::size_t wq_off = 0, bq_off = 0, wk_off = 0, bk_off = 0;
    std::size_t wv_off = 0, bv_off = 0, wo_off = 0, bo_off = 0;

    void init(ParamStore& p, const std::string& name, int d, int h);
    struct Cache {
        Tensor xq, xkv;   // [B, Sq, D], [B, Skv, D]
        Tensor q, k, v;   // [B, S*, D]
        Tensor attn;      // [B, heads, Sq, Skv]
        Tensor concat;    // [B, Sq, D] heads concatenated, before Wo
    };
    // xq: [B, Sq, D], xkv: [B, Skv, D] -> [B, Sq, D]
    Tensor fw(const ParamStore& p, const Tensor& xq, const Tensor& xkv, Cache& c) const;
    // returns d_xq; d_xkv accumulated into dxkv
    Tensor bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g, Tensor& dxkv) const;
};

/// Learned 4x temporal upsampler: pointwise shuffle of channel groups into
/// sub-slots; output index 4t+j comes from input step t, so the time mapping
/// is strictly monotone by construction.
struct PixelShuffle1d {
    int factor = 4;
    // x: [C*factor, T] -> [C, factor*T]
    Tensor fw(const Tensor& x) const;
    Tensor bw(const Tensor& dy) const;
};

/// 2x linear-interpolation upsampling along time; adjoint used as backward.
struct Upsample2x {
    // x: [C, T] -> [C, 2T]
    Tensor fw(const Tensor& x) const;
    Tensor bw(const Tensor& dy, int in_len) const;
};

// helpers
Tensor crop_time(const Tensor& x, int new_len);
Tensor pad_time_grad(const Tensor& dy, int orig_len);
Tensor concat_ch(const Tensor& a, const Tensor& b);
void split_ch_grad(const Tensor& dy, int ch_a, Tensor& da, Tensor& db);

/// mean over all elements of w(t) * (pred - target)^2; returns loss, writes
/// d(loss)/d(pred). Weights default to 1 when empty.
double weighted_mse(const Tensor& pred, const Tensor& target, const std::vector<double>& weights,
                    Tensor& dpred);

} // namespace earcardio::nn
