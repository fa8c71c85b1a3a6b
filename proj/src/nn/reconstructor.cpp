#include "earcardio/nn/reconstructor.hpp"

#include <cmath>

#include "earcardio/core/beats.hpp"
#include "earcardio/util/errors.hpp"

namespace earcardio::nn {

namespace {

// classic sinusoidal positions; pure function of (T, D)
Tensor positional_encoding(int t_len, int d) {
    Tensor pe({t_len, d});
    for (int t = 0; t < t_len; ++t) {
        for (int j = 0; j < d / 2; ++j) {
            const double freq = std::pow(10000.0, -2.0 * j / static_cast<double>(d));
            pe.at(t, 2 * j) = std::sin(t * freq);
            pe.at(t, 2 * j + 1) = std::cos(t * freq);
        }
    }
    return pe;
}

Tensor transpose_ct(const Tensor& x) { // [C, T] -> [T, C]
    Tensor y({x.shape[1], x.shape[0]});
    for (int c = 0; c < x.shape[0]; ++c)
        for (int t = 0; t < x.shape[1]; ++t) y.at(t, c) = x.at(c, t);
    return y;
}

Tensor reshape3(const Tensor& x, int b, int s, int d) {
    Tensor y = x;
    y.shape = {b, s, d};
    return y;
}

Tensor reshape2(const Tensor& x, int m, int d) {
    Tensor y = x;
    y.shape = {m, d};
    return y;
}

} // namespace

std::vector<double> region_weight_vector(std::size_t n, const std::vector<std::size_t>& peaks,
                                         const RegionWeights& w, double rate_hz) {
    std::vector<double> out(n, 1.0);
    if (w.alpha == 0.0 || peaks.empty()) return out;
    const auto delta = static_cast<long>(std::floor(w.delta_ms * rate_hz / 1000.0 + 0.5));
    for (auto p : peaks) {
        const long lo = std::max<long>(0, static_cast<long>(p) - delta);
        const long hi = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(p) + delta);
        for (long i = lo; i <= hi; ++i) out[static_cast<std::size_t>(i)] = 1.0 + w.alpha;
    }
    return out;
}

double region_focused_loss(const std::vector<double>& pred, const std::vector<double>& target,
                           const RegionWeights& w, const std::vector<std::size_t>& target_peaks,
                           double rate_hz) {
    if (pred.size() != target.size())
        throw DataError("region_focused_loss: length mismatch");
    for (auto p : target_peaks)
        if (p >= target.size()) throw DataError("region_focused_loss: peak index out of range");
    auto weights = region_weight_vector(pred.size(), target_peaks, w, rate_hz);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        acc += weights[i] * e * e;
    }
    return acc / static_cast<double>(pred.size());
}

ReconstructorModel::ReconstructorModel(const ReconstructorConfig& cfg, const TaskHeadSpec& head)
    : cfg_(cfg), head_(head) {
    const int d = cfg_.feat_ch;
    const int k = cfg_.kernel, p = cfg_.kernel / 2;
    f0_.init(params_, "feat0", kNumChannels, d, k, 1, p);
    f1_.init(params_, "feat1", d, d, k, 1, p);
    blocks_.resize(static_cast<std::size_t>(cfg_.n_blocks));
    for (int i = 0; i < cfg_.n_blocks; ++i) {
        auto tag = "block" + std::to_string(i);
        auto& b = blocks_[static_cast<std::size_t>(i)];
        b.ln1.init(params_, tag + ".ln1", d);
        b.attn.init(params_, tag + ".attn", d, cfg_.heads);
        b.ln2.init(params_, tag + ".ln2", d);
        b.ffn1.init(params_, tag + ".ffn1", d, cfg_.ffn_dim);
        b.ffn2.init(params_, tag + ".ffn2", cfg_.ffn_dim, d);
    }
    up_conv_.init(params_, "upsampler", d, cfg_.up_ch * kUpsampleFactor, 3, 1, 1);
    shuffle_.factor = kUpsampleFactor;
    head_start_ = params_.size();
    register_head();
    params_.init_params(cfg_.seed);
}

void ReconstructorModel::register_head() {
    if (head_.kind == "waveform") {
        head_conv_.init(params_, "head.fc", cfg_.up_ch, head_.out_dim, 1, 1, 0);
    } else if (head_.kind == "pooled") {
        head_lin_.init(params_, "head.fc", cfg_.up_ch, head_.out_dim);
    } else {
        throw ConfigError("ReconstructorModel: unknown head kind '" + head_.kind + "'");
    }
}

void ReconstructorModel::swap_head(const TaskHeadSpec& new_head, uint64_t head_seed) {
    params_.truncate_from(head_start_);
    head_ = new_head;
    register_head();
    params_.init_from(head_seed, head_start_);
}

Tensor ReconstructorModel::forward(const Tensor& window, Acts& acts) const {
    if (window.shape.size() != 2 || window.shape[0] != kNumChannels)
        throw TrainingError("ReconstructorModel: input must be 6 x T");
    for (double v : window.data)
        if (!std::isfinite(v)) throw TrainingError("ReconstructorModel: non-finite input (numeric guard)");

    const int t_len = window.shape[1];
    const int d = cfg_.feat_ch;
    acts.t_len = t_len;
    acts.blocks.resize(blocks_.size());

    auto h0 = gelu_.fw(f0_.fw(params_, window, acts.f0), acts.g0);
    auto h1 = gelu_.fw(f1_.fw(params_, h0, acts.f1), acts.g1);

    Tensor h = transpose_ct(h1); // [T, D]
    auto pe = positional_encoding(t_len, d);
    for (std::size_t i = 0; i < h.numel(); ++i) h.data[i] += pe.data[i];

    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto& blk = blocks_[bi];
        auto& ba = acts.blocks[bi];
        ba.h_in = h;
        auto n1 = blk.ln1.fw(params_, h, ba.ln1);
        auto n1_3 = reshape3(n1, 1, t_len, d);
        auto a = blk.attn.fw(params_, n1_3, n1_3, ba.attn);
        for (std::size_t i = 0; i < h.numel(); ++i) h.data[i] += a.data[i];
        ba.h_mid = h;
        auto n2 = blk.ln2.fw(params_, h, ba.ln2);
        auto f = blk.ffn2.fw(params_, gelu_.fw(blk.ffn1.fw(params_, n2, ba.ffn1), ba.g), ba.ffn2);
        for (std::size_t i = 0; i < h.numel(); ++i) h.data[i] += f.data[i];
    }
    acts.h_seq = h;

    auto hc = transpose_ct(reshape2(h, t_len, d)); // back to [D, T]
    auto up = up_conv_.fw(params_, hc, acts.up);
    auto up_sh = shuffle_.fw(up); // [up_ch, 4T]
    acts.up_feat = gelu_.fw(up_sh, acts.g_up);

    Tensor y;
    if (head_.kind == "waveform") {
        y = head_conv_.fw(params_, acts.up_feat, acts.head_conv);
    } else {
        // mean over time, then the linear head
        const int uc = cfg_.up_ch;
        const int tf = acts.up_feat.shape[1];
        Tensor pooled({1, uc});
        for (int c = 0; c < uc; ++c) {
            double acc = 0.0;
            for (int t = 0; t < tf; ++t) acc += acts.up_feat.at(c, t);
            pooled.at(0, c) = acc / tf;
        }
        acts.pooled.assign(pooled.data.begin(), pooled.data.end());
        y = head_lin_.fw(params_, pooled, acts.head_lin);
    }
    for (double v : y.data)
        if (!std::isfinite(v)) throw TrainingError("ReconstructorModel: non-finite output (numeric guard)");
    return y;
}

void ReconstructorModel::backward(const Acts& acts, const Tensor& dout, GradBuf& g) const {
    const int t_len = acts.t_len;
    const int d = cfg_.feat_ch;

    Tensor dup_feat;
    if (head_.kind == "waveform") {
        dup_feat = head_conv_.bw(params_, acts.head_conv, dout, g);
    } else {
        auto dpooled = head_lin_.bw(params_, acts.head_lin, dout, g);
        const int uc = cfg_.up_ch;
        const int tf = acts.up_feat.shape[1];
        dup_feat = Tensor({uc, tf});
        for (int c = 0; c < uc; ++c)
            for (int t = 0; t < tf; ++t) dup_feat.at(c, t) = dpooled.at(0, c) / tf;
    }

    auto dup_sh = gelu_.bw(acts.g_up, dup_feat);
    auto dup = shuffle_.bw(dup_sh);
    auto dhc = up_conv_.bw(params_, acts.up, dup, g);
    Tensor dh = transpose_ct(dhc); // [T, D]

    for (long bi = static_cast<long>(blocks_.size()) - 1; bi >= 0; --bi) {
        const auto& blk = blocks_[static_cast<std::size_t>(bi)];
        const auto& ba = acts.blocks[static_cast<std::size_t>(bi)];
        // FFN residual
        auto df = dh; // gradient into the ffn branch
        auto dffn_mid = blk.ffn2.bw(params_, ba.ffn2, df, g);
        auto dffn_in = blk.ffn1.bw(params_, ba.ffn1, gelu_.bw(ba.g, dffn_mid), g);
        auto dn2 = blk.ln2.bw(params_, ba.ln2, dffn_in, g);
        for (std::size_t i = 0; i < dh.numel(); ++i) dh.data[i] += dn2.data[i];
        // attention residual
        auto da = dh;
        Tensor dkv;
        auto da3 = reshape3(da, 1, t_len, d);
        auto dn1q = blk.attn.bw(params_, ba.attn, da3, g, dkv);
        Tensor dn1({t_len, d});
        for (std::size_t i = 0; i < dn1.numel(); ++i)
            dn1.data[i] = dn1q.data[i] + dkv.data[i];
        auto dh_in = blk.ln1.bw(params_, ba.ln1, dn1, g);
        for (std::size_t i = 0; i < dh.numel(); ++i) dh.data[i] += dh_in.data[i];
    }

    // positional encoding adds a constant: gradient passes through
    auto dh1 = transpose_ct(reshape2(dh, t_len, d)); // [D, T]
    auto df1 = gelu_.bw(acts.g1, dh1);
    auto dh0 = f1_.bw(params_, acts.f1, df1, g);
    auto df0 = gelu_.bw(acts.g0, dh0);
    f0_.bw(params_, acts.f0, df0, g);
}

ScgWaveform reconstruct_window(const ReconstructorModel& model, const Tensor& window) {
    ReconstructorModel::Acts acts;
    auto y = model.forward(window, acts);
    ScgWaveform w;
    w.rate_hz = 100.0;
    w.samples.assign(y.data.begin(), y.data.end());
    auto seg = segment_beats(w.samples, w.rate_hz);
    w.beat_annotations = seg.peak_indices;
    return w;
}

} // namespace earcardio::nn
