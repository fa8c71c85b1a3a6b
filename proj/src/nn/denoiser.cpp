#include "earcardio/nn/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include "earcardio/dsp/fft.hpp"

namespace earcardio::nn {

void EnhancerInput::validate() const {
    if (window.shape.size() != 2 || window.shape[0] != kNumChannels || window.shape[1] != kWindowLen)
        throw DataError("EnhancerInput: window must be 6 x 125");
    if (mask.size() != static_cast<std::size_t>(kWindowLen))
        throw DataError("EnhancerInput: mask length must match the window");
    for (double m : mask)
        if (m != 0.0 && m != 1.0) throw DataError("EnhancerInput: mask must be binary");
    for (double v : window.data)
        if (!std::isfinite(v)) throw DataError("EnhancerInput: non-finite sample");
}

DenoiserModel::DenoiserModel(const DenoiserConfig& cfg) : cfg_(cfg) {
    const int d = cfg_.attn_dim;
    const int tokens = kNumChannels + 1; // 6 axes + mask
    emb_w_off_ = params_.add("chan_embed.w", {tokens, d}, 1);
    emb_b_off_ = params_.add("chan_embed.b", {tokens, d}, 0);
    attn_.init(params_, "chan_attn", d, cfg_.attn_heads);
    proj_w_off_ = params_.add("chan_proj.w", {kNumChannels, d}, d);
    proj_b_off_ = params_.add("chan_proj.b", {kNumChannels}, 0);

    const int k = cfg_.kernel, p = cfg_.kernel / 2;
    enc1_.init(params_, "enc1", kNumChannels, cfg_.enc1_ch, k, 2, p);
    enc2_.init(params_, "enc2", cfg_.enc1_ch, cfg_.enc2_ch, k, 2, p);
    bott_.init(params_, "bottleneck", cfg_.enc2_ch, cfg_.enc2_ch, 3, 1, 1);
    dec1_.init(params_, "dec1", cfg_.enc2_ch + cfg_.enc1_ch, cfg_.enc1_ch, k, 1, p);
    dec2_.init(params_, "dec2", cfg_.enc1_ch + kNumChannels, cfg_.enc1_ch, k, 1, p);
    out_.init(params_, "out", cfg_.enc1_ch, kNumChannels, 1, 1, 0);
    params_.init_params(cfg_.seed);
}

Tensor DenoiserModel::forward(const EnhancerInput& in, Acts& acts) const {
    const Tensor& x = in.window;
    if (x.shape.size() != 2 || x.shape[0] != kNumChannels)
        throw TrainingError("DenoiserModel: input must be 6 x T");
    const int t_len = x.shape[1];
    if (in.mask.size() != static_cast<std::size_t>(t_len))
        throw TrainingError("DenoiserModel: mask/window length mismatch");
    for (double v : x.data)
        if (!std::isfinite(v)) throw TrainingError("DenoiserModel: non-finite input (numeric guard)");

    acts.t_len = t_len;
    acts.x_in = x;
    acts.mask_in = in.mask;
    const int d = cfg_.attn_dim;
    const int tokens = kNumChannels + 1;

    // per-timestep channel tokens: e[t,c,:] = w[c,:] * value + b[c,:]
    acts.embed = Tensor({t_len, tokens, d});
    const double* ew = params_.ptr(emb_w_off_);
    const double* eb = params_.ptr(emb_b_off_);
    for (int t = 0; t < t_len; ++t) {
        for (int c = 0; c < tokens; ++c) {
            const double v = c < kNumChannels ? x.at(c, t) : in.mask[static_cast<std::size_t>(t)];
            double* e = acts.embed.data.data() + (static_cast<std::size_t>(t) * tokens + c) * d;
            for (int j = 0; j < d; ++j) e[j] = ew[c * d + j] * v + eb[c * d + j];
        }
    }
    // queries: the 6 signal tokens; keys/values: all 7
    Tensor xq({t_len, kNumChannels, d});
    for (int t = 0; t < t_len; ++t)
        for (int c = 0; c < kNumChannels; ++c)
            for (int j = 0; j < d; ++j) xq.at(t, c, j) = acts.embed.at(t, c, j);
    acts.attn_out = attn_.fw(params_, xq, acts.embed, acts.attn);

    // project each refined token back to a scalar and add as a correction
    acts.x1 = x;
    const double* pw = params_.ptr(proj_w_off_);
    const double* pb = params_.ptr(proj_b_off_);
    for (int c = 0; c < kNumChannels; ++c) {
        for (int t = 0; t < t_len; ++t) {
            double acc = pb[c];
            for (int j = 0; j < d; ++j) acc += pw[c * d + j] * acts.attn_out.at(t, c, j);
            acts.x1.at(c, t) += acc;
        }
    }

    auto c1 = enc1_.fw(params_, acts.x1, acts.enc1);
    acts.c1g = gelu_.fw(c1, acts.g_e1);
    auto c2 = enc2_.fw(params_, acts.c1g, acts.enc2);
    auto c2g = gelu_.fw(c2, acts.g_e2);
    auto b = bott_.fw(params_, c2g, acts.bott);
    auto bg = gelu_.fw(b, acts.g_b);

    auto u1 = crop_time(up_.fw(bg), acts.c1g.shape[1]);
    auto d1 = dec1_.fw(params_, concat_ch(u1, acts.c1g), acts.dec1);
    auto d1g = gelu_.fw(d1, acts.g_d1);
    auto u2 = crop_time(up_.fw(d1g), t_len);
    auto d2 = dec2_.fw(params_, concat_ch(u2, acts.x1), acts.dec2);
    auto d2g = gelu_.fw(d2, acts.g_d2);
    auto y = out_.fw(params_, d2g, acts.out);

    for (double v : y.data)
        if (!std::isfinite(v)) throw TrainingError("DenoiserModel: non-finite output (numeric guard)");
    return y;
}

void DenoiserModel::backward(const Acts& acts, const Tensor& dout, GradBuf& g) const {
    const int t_len = acts.t_len;
    const int d = cfg_.attn_dim;
    const int tokens = kNumChannels + 1;

    auto dd2g = out_.bw(params_, acts.out, dout, g);
    auto dd2 = gelu_.bw(acts.g_d2, dd2g);
    auto dcat2 = dec2_.bw(params_, acts.dec2, dd2, g);
    Tensor du2, dx1_a;
    split_ch_grad(dcat2, cfg_.enc1_ch, du2, dx1_a);

    auto dd1g = up_.bw(pad_time_grad(du2, 2 * acts.dec1.x.shape[1]), acts.dec1.x.shape[1]);
    auto dd1 = gelu_.bw(acts.g_d1, dd1g);
    auto dcat1 = dec1_.bw(params_, acts.dec1, dd1, g);
    Tensor du1, dc1g_a;
    split_ch_grad(dcat1, cfg_.enc2_ch, du1, dc1g_a);

    auto dbg = up_.bw(pad_time_grad(du1, 2 * acts.bott.x.shape[1]), acts.bott.x.shape[1]);
    auto db = gelu_.bw(acts.g_b, dbg);
    auto dc2g = bott_.bw(params_, acts.bott, db, g);
    auto dc2 = gelu_.bw(acts.g_e2, dc2g);
    auto dc1g_b = enc2_.bw(params_, acts.enc2, dc2, g);
    for (std::size_t i = 0; i < dc1g_a.numel(); ++i) dc1g_a.data[i] += dc1g_b.data[i];
    auto dc1 = gelu_.bw(acts.g_e1, dc1g_a);
    auto dx1_b = enc1_.bw(params_, acts.enc1, dc1, g);

    Tensor dx1 = dx1_a;
    for (std::size_t i = 0; i < dx1.numel(); ++i) dx1.data[i] += dx1_b.data[i];

    // back through the channel projection
    const double* pw = params_.ptr(proj_w_off_);
    double* dpw = g.data() + proj_w_off_;
    double* dpb = g.data() + proj_b_off_;
    Tensor dattn({t_len, kNumChannels, d});
    for (int c = 0; c < kNumChannels; ++c) {
        for (int t = 0; t < t_len; ++t) {
            const double dv = dx1.at(c, t);
            dpb[c] += dv;
            for (int j = 0; j < d; ++j) {
                dpw[c * d + j] += dv * acts.attn_out.at(t, c, j);
                dattn.at(t, c, j) = dv * pw[c * d + j];
            }
        }
    }

    Tensor dembed; // accumulated via kv path
    auto dxq = attn_.bw(params_, acts.attn, dattn, g, dembed);
    for (int t = 0; t < t_len; ++t)
        for (int c = 0; c < kNumChannels; ++c)
            for (int j = 0; j < d; ++j) dembed.at(t, c, j) += dxq.at(t, c, j);

    // back through the per-channel embedding
    double* dew = g.data() + emb_w_off_;
    double* deb = g.data() + emb_b_off_;
    for (int t = 0; t < t_len; ++t) {
        for (int c = 0; c < tokens; ++c) {
            const double val = c < kNumChannels ? acts.x_in.at(c, t)
                                                : acts.mask_in[static_cast<std::size_t>(t)];
            const double* de = dembed.data.data() + (static_cast<std::size_t>(t) * tokens + c) * d;
            for (int j = 0; j < d; ++j) {
                dew[c * d + j] += de[j] * val;
                deb[c * d + j] += de[j];
            }
        }
    }
}

EnsembleResult ensemble_refine(const EnhancerInput& in, const BeatSegmentation& beats,
                               double rate_hz) {
    EnsembleResult res;
    res.window = in.window;
    if (beats.size() < 2) {
        res.degraded = true;
        return res;
    }
    const int t_len = in.window.shape[1];
    const int pre = static_cast<int>(beats.window_pre_ms * rate_hz / 1000.0);
    const int post = static_cast<int>(beats.window_post_ms * rate_hz / 1000.0);

    for (int c = 0; c < kNumChannels; ++c) {
        // per-phase median template from mask-present samples only
        std::vector<std::vector<double>> bins(static_cast<std::size_t>(pre + post + 1));
        for (auto p : beats.peak_indices) {
            for (int phi = -pre; phi <= post; ++phi) {
                const long idx = static_cast<long>(p) + phi;
                if (idx < 0 || idx >= t_len) continue;
                if (in.mask[static_cast<std::size_t>(idx)] == 0.0) continue;
                bins[static_cast<std::size_t>(phi + pre)].push_back(in.window.at(c, static_cast<int>(idx)));
            }
        }
        std::vector<double> tmpl(bins.size());
        std::vector<bool> have(bins.size(), false);
        for (std::size_t k = 0; k < bins.size(); ++k) {
            auto& v = bins[k];
            if (v.empty()) continue;
            std::sort(v.begin(), v.end());
            tmpl[k] = v.size() % 2 == 1 ? v[v.size() / 2]
                                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
            have[k] = true;
        }
        // write template values into masked-out samples near their anchor
        for (int t = 0; t < t_len; ++t) {
            if (in.mask[static_cast<std::size_t>(t)] != 0.0) continue;
            long best_gap = t_len;
            long anchor = -1;
            for (auto p : beats.peak_indices) {
                long gap = std::labs(static_cast<long>(t) - static_cast<long>(p));
                if (gap < best_gap) {
                    best_gap = gap;
                    anchor = static_cast<long>(p);
                }
            }
            const long phi = static_cast<long>(t) - anchor;
            if (phi < -pre || phi > post) continue;
            const auto k = static_cast<std::size_t>(phi + pre);
            if (have[k]) res.window.at(c, t) = tmpl[k];
        }
    }
    return res;
}

int rank_best_channel(const Tensor& window, double rate_hz) {
    int best = 0;
    double best_score = -1.0;
    for (int c = 0; c < window.shape[0]; ++c) {
        std::vector<double> ch(window.shape[1]);
        for (int t = 0; t < window.shape[1]; ++t) ch[static_cast<std::size_t>(t)] = window.at(c, t);
        auto bp = dsp::brickwall_bandpass(ch, rate_hz, 1.0, std::min(10.0, rate_hz / 2.0 * 0.98));
        double score = 0.0;
        for (double v : bp) score += v * v;
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

} // namespace earcardio::nn
