#include "earcardio/nn/ops.hpp"

#include <cmath>

#include "earcardio/util/errors.hpp"

namespace earcardio::nn {

namespace {
constexpr double kLnEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
} // namespace

// ---- Linear ----------------------------------------------------------------

void Linear::init(ParamStore& p, const std::string& name, int in, int out) {
    in_dim = in;
    out_dim = out;
    w_off = p.add(name + ".w", {in, out}, in);
    b_off = p.add(name + ".b", {out}, 0);
}

Tensor Linear::fw(const ParamStore& p, const Tensor& x, Cache& c) const {
    c.x = x;
    const int m = static_cast<int>(x.numel()) / in_dim;
    const double* w = p.ptr(w_off);
    const double* b = p.ptr(b_off);
    Tensor y({m, out_dim});
    for (int i = 0; i < m; ++i) {
        const double* xi = x.data.data() + static_cast<std::size_t>(i) * in_dim;
        double* yi = y.data.data() + static_cast<std::size_t>(i) * out_dim;
        for (int j = 0; j < out_dim; ++j) yi[j] = b[j];
        for (int k = 0; k < in_dim; ++k) {
            const double xv = xi[k];
            const double* wk = w + static_cast<std::size_t>(k) * out_dim;
            for (int j = 0; j < out_dim; ++j) yi[j] += xv * wk[j];
        }
    }
    return y;
}

Tensor Linear::bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const {
    const int m = static_cast<int>(c.x.numel()) / in_dim;
    const double* w = p.ptr(w_off);
    double* dw = g.data() + w_off;
    double* db = g.data() + b_off;
    Tensor dx(c.x.shape);
    for (int i = 0; i < m; ++i) {
        const double* xi = c.x.data.data() + static_cast<std::size_t>(i) * in_dim;
        const double* dyi = dy.data.data() + static_cast<std::size_t>(i) * out_dim;
        double* dxi = dx.data.data() + static_cast<std::size_t>(i) * in_dim;
        for (int j = 0; j < out_dim; ++j) db[j] += dyi[j];
        for (int k = 0; k < in_dim; ++k) {
            const double* wk = w + static_cast<std::size_t>(k) * out_dim;
            double* dwk = dw + static_cast<std::size_t>(k) * out_dim;
            double acc = 0.0;
            const double xv = xi[k];
            for (int j = 0; j < out_dim; ++j) {
                acc += dyi[j] * wk[j];
                dwk[j] += xv * dyi[j];
            }
            dxi[k] = acc;
        }
    }
    return dx;
}

// ---- Conv1d ----------------------------------------------------------------

void Conv1d::init(ParamStore& p, const std::string& name, int in, int out, int k, int s, int padding) {
    in_ch = in;
    out_ch = out;
    kernel = k;
    stride = s;
    pad = padding;
    w_off = p.add(name + ".w", {out, in, k}, in * k);
    b_off = p.add(name + ".b", {out}, 0);
}

Tensor Conv1d::fw(const ParamStore& p, const Tensor& x, Cache& c) const {
    c.x = x;
    const int t_in = x.shape[1];
    const int t_out = out_len(t_in);
    const double* w = p.ptr(w_off);
    const double* b = p.ptr(b_off);
    Tensor y({out_ch, t_out});
    for (int co = 0; co < out_ch; ++co) {
        double* yo = y.data.data() + static_cast<std::size_t>(co) * t_out;
        for (int to = 0; to < t_out; ++to) yo[to] = b[co];
        for (int ci = 0; ci < in_ch; ++ci) {
            const double* xi = x.data.data() + static_cast<std::size_t>(ci) * t_in;
            const double* wk = w + (static_cast<std::size_t>(co) * in_ch + ci) * kernel;
            for (int to = 0; to < t_out; ++to) {
                const int base = to * stride - pad;
                double acc = 0.0;
                for (int k = 0; k < kernel; ++k) {
                    const int ti = base + k;
                    if (ti >= 0 && ti < t_in) acc += wk[k] * xi[ti];
                }
                yo[to] += acc;
            }
        }
    }
    return y;
}

Tensor Conv1d::bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const {
    const int t_in = c.x.shape[1];
    const int t_out = dy.shape[1];
    const double* w = p.ptr(w_off);
    double* dw = g.data() + w_off;
    double* db = g.data() + b_off;
    Tensor dx({in_ch, t_in});
    for (int co = 0; co < out_ch; ++co) {
        const double* dyo = dy.data.data() + static_cast<std::size_t>(co) * t_out;
        for (int to = 0; to < t_out; ++to) db[co] += dyo[to];
        for (int ci = 0; ci < in_ch; ++ci) {
            const double* xi = c.x.data.data() + static_cast<std::size_t>(ci) * t_in;
            double* dxi = dx.data.data() + static_cast<std::size_t>(ci) * t_in;
            const double* wk = w + (static_cast<std::size_t>(co) * in_ch + ci) * kernel;
            double* dwk = dw + (static_cast<std::size_t>(co) * in_ch + ci) * kernel;
            for (int to = 0; to < t_out; ++to) {
                const int base = to * stride - pad;
                const double dv = dyo[to];
                for (int k = 0; k < kernel; ++k) {
                    const int ti = base + k;
                    if (ti >= 0 && ti < t_in) {
                        dwk[k] += dv * xi[ti];
                        dxi[ti] += dv * wk[k];
                    }
                }
            }
        }
    }
    return dx;
}

// ---- Gelu ------------------------------------------------------------------

Tensor Gelu::fw(const Tensor& x, Cache& c) const {
    c.x = x;
    Tensor y(x.shape);
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const double v = x.data[i];
        y.data[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    }
    return y;
}

Tensor Gelu::bw(const Cache& c, const Tensor& dy) const {
    Tensor dx(c.x.shape);
    for (std::size_t i = 0; i < dx.numel(); ++i) {
        const double v = c.x.data[i];
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
        dx.data[i] = dy.data[i] * (cdf + v * pdf);
    }
    return dx;
}

// ---- LayerNorm ---------------------------------------------------------------

void LayerNorm::init(ParamStore& p, const std::string& name, int d) {
    dim = d;
    gamma_off = p.add(name + ".gamma", {d}, 0);
    beta_off = p.add(name + ".beta", {d}, 0);
    // gamma starts at 1
    for (int i = 0; i < d; ++i) p.ptr(gamma_off)[i] = 1.0;
}

Tensor LayerNorm::fw(const ParamStore& p, const Tensor& x, Cache& c) const {
    const int m = static_cast<int>(x.numel()) / dim;
    const double* gamma = p.ptr(gamma_off);
    const double* beta = p.ptr(beta_off);
    Tensor y(x.shape);
    c.xhat = Tensor(x.shape);
    c.rstd.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* xi = x.data.data() + static_cast<std::size_t>(i) * dim;
        double* yi = y.data.data() + static_cast<std::size_t>(i) * dim;
        double* xh = c.xhat.data.data() + static_cast<std::size_t>(i) * dim;
        double mean = 0.0;
        for (int j = 0; j < dim; ++j) mean += xi[j];
        mean /= dim;
        double var = 0.0;
        for (int j = 0; j < dim; ++j) var += (xi[j] - mean) * (xi[j] - mean);
        var /= dim;
        const double rstd = 1.0 / std::sqrt(var + kLnEps);
        c.rstd[i] = rstd;
        for (int j = 0; j < dim; ++j) {
            xh[j] = (xi[j] - mean) * rstd;
            yi[j] = xh[j] * gamma[j] + beta[j];
        }
    }
    return y;
}

Tensor LayerNorm::bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g) const {
    const int m = static_cast<int>(c.xhat.numel()) / dim;
    const double* gamma = p.ptr(gamma_off);
    double* dgamma = g.data() + gamma_off;
    double* dbeta = g.data() + beta_off;
    Tensor dx(c.xhat.shape);
    for (int i = 0; i < m; ++i) {
        const double* dyi = dy.data.data() + static_cast<std::size_t>(i) * dim;
        const double* xh = c.xhat.data.data() + static_cast<std::size_t>(i) * dim;
        double* dxi = dx.data.data() + static_cast<std::size_t>(i) * dim;
        double sum_gdy = 0.0, sum_gdy_xh = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double gdy = gamma[j] * dyi[j];
            sum_gdy += gdy;
            sum_gdy_xh += gdy * xh[j];
            dgamma[j] += dyi[j] * xh[j];
            dbeta[j] += dyi[j];
        }
        const double inv_d = 1.0 / dim;
        for (int j = 0; j < dim; ++j) {
            const double gdy = gamma[j] * dyi[j];
            dxi[j] = c.rstd[i] * (gdy - inv_d * sum_gdy - xh[j] * inv_d * sum_gdy_xh);
        }
    }
    return dx;
}

// ---- Mha -------------------------------------------------------------------

void Mha::init(ParamStore& p, const std::string& name, int d, int h) {
    if (d % h != 0) throw TrainingError("Mha: dim must be divisible by heads");
    dim = d;
    heads = h;
    wq_off = p.add(name + ".wq", {d, d}, d);
    bq_off = p.add(name + ".bq", {d}, 0);
    wk_off = p.add(name + ".wk", {d, d}, d);
    bk_off = p.add(name + ".bk", {d}, 0);
    wv_off = p.add(name + ".wv", {d, d}, d);
    bv_off = p.add(name + ".bv", {d}, 0);
    wo_off = p.add(name + ".wo", {d, d}, d);
    bo_off = p.add(name + ".bo", {d}, 0);
}

namespace {

// y[i,:] = x[i,:] W + b over rows of a [S, D] block
void proj_rows(const double* x, int s, int d, const double* w, const double* b, double* y) {
    for (int i = 0; i < s; ++i) {
        const double* xi = x + static_cast<std::size_t>(i) * d;
        double* yi = y + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) yi[j] = b[j];
        for (int k = 0; k < d; ++k) {
            const double xv = xi[k];
            const double* wk = w + static_cast<std::size_t>(k) * d;
            for (int j = 0; j < d; ++j) yi[j] += xv * wk[j];
        }
    }
}

// accumulates dW, db, and dx for y = xW + b
void proj_rows_bw(const double* x, int s, int d, const double* w, const double* dy, double* dx,
                  double* dw, double* db) {
    for (int i = 0; i < s; ++i) {
        const double* xi = x + static_cast<std::size_t>(i) * d;
        const double* dyi = dy + static_cast<std::size_t>(i) * d;
        double* dxi = dx + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) db[j] += dyi[j];
        for (int k = 0; k < d; ++k) {
            const double* wk = w + static_cast<std::size_t>(k) * d;
            double* dwk = dw + static_cast<std::size_t>(k) * d;
            double acc = 0.0;
            for (int j = 0; j < d; ++j) {
                acc += dyi[j] * wk[j];
                dwk[j] += xi[k] * dyi[j];
            }
            dxi[k] += acc;
        }
    }
}

} // namespace

Tensor Mha::fw(const ParamStore& p, const Tensor& xq, const Tensor& xkv, Cache& c) const {
    const int b = xq.shape[0], sq = xq.shape[1], skv = xkv.shape[1];
    const int dh = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    c.xq = xq;
    c.xkv = xkv;
    c.q = Tensor({b, sq, dim});
    c.k = Tensor({b, skv, dim});
    c.v = Tensor({b, skv, dim});
    c.attn = Tensor({b, heads, sq, skv});
    c.concat = Tensor({b, sq, dim});
    Tensor y({b, sq, dim});

    for (int bi = 0; bi < b; ++bi) {
        const double* xq_b = xq.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        const double* xkv_b = xkv.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        double* q = c.q.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        double* k = c.k.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        double* v = c.v.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        proj_rows(xq_b, sq, dim, p.ptr(wq_off), p.ptr(bq_off), q);
        proj_rows(xkv_b, skv, dim, p.ptr(wk_off), p.ptr(bk_off), k);
        proj_rows(xkv_b, skv, dim, p.ptr(wv_off), p.ptr(bv_off), v);

        double* concat = c.concat.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        for (int h = 0; h < heads; ++h) {
            const int hoff = h * dh;
            double* attn = c.attn.data.data() +
                           ((static_cast<std::size_t>(bi) * heads + h) * sq) * skv;
            for (int i = 0; i < sq; ++i) {
                double* arow = attn + static_cast<std::size_t>(i) * skv;
                const double* qi = q + static_cast<std::size_t>(i) * dim + hoff;
                double maxv = -1e300;
                for (int j = 0; j < skv; ++j) {
                    const double* kj = k + static_cast<std::size_t>(j) * dim + hoff;
                    double s = 0.0;
                    for (int e = 0; e < dh; ++e) s += qi[e] * kj[e];
                    arow[j] = s * scale;
                    maxv = std::max(maxv, arow[j]);
                }
                double z = 0.0;
                for (int j = 0; j < skv; ++j) {
                    arow[j] = std::exp(arow[j] - maxv);
                    z += arow[j];
                }
                for (int j = 0; j < skv; ++j) arow[j] /= z;
                double* out = concat + static_cast<std::size_t>(i) * dim + hoff;
                for (int e = 0; e < dh; ++e) out[e] = 0.0;
                for (int j = 0; j < skv; ++j) {
                    const double a = arow[j];
                    const double* vj = v + static_cast<std::size_t>(j) * dim + hoff;
                    for (int e = 0; e < dh; ++e) out[e] += a * vj[e];
                }
            }
        }
        double* yb = y.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        proj_rows(concat, sq, dim, p.ptr(wo_off), p.ptr(bo_off), yb);
    }
    return y;
}

Tensor Mha::bw(const ParamStore& p, const Cache& c, const Tensor& dy, GradBuf& g, Tensor& dxkv) const {
    const int b = c.xq.shape[0], sq = c.xq.shape[1], skv = c.xkv.shape[1];
    const int dh = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Tensor dxq(c.xq.shape);
    if (!dxkv.same_shape(c.xkv)) dxkv = Tensor(c.xkv.shape);

    std::vector<double> dconcat(static_cast<std::size_t>(sq) * dim);
    std::vector<double> dq(static_cast<std::size_t>(sq) * dim);
    std::vector<double> dk(static_cast<std::size_t>(skv) * dim);
    std::vector<double> dv(static_cast<std::size_t>(skv) * dim);

    for (int bi = 0; bi < b; ++bi) {
        const double* concat = c.concat.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        const double* dyb = dy.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        std::fill(dconcat.begin(), dconcat.end(), 0.0);
        std::fill(dq.begin(), dq.end(), 0.0);
        std::fill(dk.begin(), dk.end(), 0.0);
        std::fill(dv.begin(), dv.end(), 0.0);
        proj_rows_bw(concat, sq, dim, p.ptr(wo_off), dyb, dconcat.data(), g.data() + wo_off,
                     g.data() + bo_off);

        const double* q = c.q.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        const double* k = c.k.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        const double* v = c.v.data.data() + static_cast<std::size_t>(bi) * skv * dim;

        for (int h = 0; h < heads; ++h) {
            const int hoff = h * dh;
            const double* attn = c.attn.data.data() +
                                 ((static_cast<std::size_t>(bi) * heads + h) * sq) * skv;
            for (int i = 0; i < sq; ++i) {
                const double* arow = attn + static_cast<std::size_t>(i) * skv;
                const double* dout = dconcat.data() + static_cast<std::size_t>(i) * dim + hoff;
                // dV and dA
                double dot = 0.0;
                std::vector<double> da(skv);
                for (int j = 0; j < skv; ++j) {
                    const double* vj = v + static_cast<std::size_t>(j) * dim + hoff;
                    double s = 0.0;
                    for (int e = 0; e < dh; ++e) s += dout[e] * vj[e];
                    da[j] = s;
                    dot += s * arow[j];
                    double* dvj = dv.data() + static_cast<std::size_t>(j) * dim + hoff;
                    for (int e = 0; e < dh; ++e) dvj[e] += arow[j] * dout[e];
                }
                // softmax backward -> dS, then dQ, dK
                const double* qi = q + static_cast<std::size_t>(i) * dim + hoff;
                double* dqi = dq.data() + static_cast<std::size_t>(i) * dim + hoff;
                for (int j = 0; j < skv; ++j) {
                    const double ds = arow[j] * (da[j] - dot) * scale;
                    const double* kj = k + static_cast<std::size_t>(j) * dim + hoff;
                    double* dkj = dk.data() + static_cast<std::size_t>(j) * dim + hoff;
                    for (int e = 0; e < dh; ++e) {
                        dqi[e] += ds * kj[e];
                        dkj[e] += ds * qi[e];
                    }
                }
            }
        }
        // back through the Q/K/V projections
        const double* xq_b = c.xq.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        const double* xkv_b = c.xkv.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        double* dxq_b = dxq.data.data() + static_cast<std::size_t>(bi) * sq * dim;
        double* dxkv_b = dxkv.data.data() + static_cast<std::size_t>(bi) * skv * dim;
        proj_rows_bw(xq_b, sq, dim, p.ptr(wq_off), dq.data(), dxq_b, g.data() + wq_off,
                     g.data() + bq_off);
        proj_rows_bw(xkv_b, skv, dim, p.ptr(wk_off), dk.data(), dxkv_b, g.data() + wk_off,
                     g.data() + bk_off);
        proj_rows_bw(xkv_b, skv, dim, p.ptr(wv_off), dv.data(), dxkv_b, g.data() + wv_off,
                     g.data() + bv_off);
    }
    return dxq;
}

// ---- shape utilities ---------------------------------------------------------

Tensor PixelShuffle1d::fw(const Tensor& x) const {
    const int cf = x.shape[0], t = x.shape[1];
    const int ch = cf / factor;
    Tensor y({ch, t * factor});
    for (int c = 0; c < ch; ++c)
        for (int j = 0; j < factor; ++j)
            for (int ti = 0; ti < t; ++ti) y.at(c, ti * factor + j) = x.at(c * factor + j, ti);
    return y;
}

Tensor PixelShuffle1d::bw(const Tensor& dy) const {
    const int ch = dy.shape[0], tf = dy.shape[1];
    const int t = tf / factor;
    Tensor dx({ch * factor, t});
    for (int c = 0; c < ch; ++c)
        for (int j = 0; j < factor; ++j)
            for (int ti = 0; ti < t; ++ti) dx.at(c * factor + j, ti) = dy.at(c, ti * factor + j);
    return dx;
}

Tensor Upsample2x::fw(const Tensor& x) const {
    const int ch = x.shape[0], t = x.shape[1];
    Tensor y({ch, 2 * t});
    for (int c = 0; c < ch; ++c) {
        for (int i = 0; i < t; ++i) {
            y.at(c, 2 * i) = x.at(c, i);
            const double nxt = i + 1 < t ? x.at(c, i + 1) : x.at(c, i);
            y.at(c, 2 * i + 1) = 0.5 * (x.at(c, i) + nxt);
        }
    }
    return y;
}

Tensor Upsample2x::bw(const Tensor& dy, int in_len) const {
    const int ch = dy.shape[0];
    Tensor dx({ch, in_len});
    for (int c = 0; c < ch; ++c) {
        for (int i = 0; i < in_len; ++i) {
            double acc = dy.at(c, 2 * i);
            acc += 0.5 * dy.at(c, 2 * i + 1);
            if (i > 0) acc += 0.5 * dy.at(c, 2 * i - 1);
            if (i == in_len - 1) acc += 0.5 * dy.at(c, 2 * i + 1); // replicated edge
            dx.at(c, i) = acc;
        }
    }
    return dx;
}

Tensor crop_time(const Tensor& x, int new_len) {
    const int ch = x.shape[0];
    Tensor y({ch, new_len});
    for (int c = 0; c < ch; ++c)
        for (int i = 0; i < new_len; ++i) y.at(c, i) = x.at(c, i);
    return y;
}

Tensor pad_time_grad(const Tensor& dy, int orig_len) {
    const int ch = dy.shape[0];
    Tensor dx({ch, orig_len});
    for (int c = 0; c < ch; ++c)
        for (int i = 0; i < dy.shape[1]; ++i) dx.at(c, i) = dy.at(c, i);
    return dx;
}

Tensor concat_ch(const Tensor& a, const Tensor& b) {
    const int t = a.shape[1];
    Tensor y({a.shape[0] + b.shape[0], t});
    for (int c = 0; c < a.shape[0]; ++c)
        for (int i = 0; i < t; ++i) y.at(c, i) = a.at(c, i);
    for (int c = 0; c < b.shape[0]; ++c)
        for (int i = 0; i < t; ++i) y.at(a.shape[0] + c, i) = b.at(c, i);
    return y;
}

void split_ch_grad(const Tensor& dy, int ch_a, Tensor& da, Tensor& db) {
    const int t = dy.shape[1];
    const int ch_b = dy.shape[0] - ch_a;
    da = Tensor({ch_a, t});
    db = Tensor({ch_b, t});
    for (int c = 0; c < ch_a; ++c)
        for (int i = 0; i < t; ++i) da.at(c, i) = dy.at(c, i);
    for (int c = 0; c < ch_b; ++c)
        for (int i = 0; i < t; ++i) db.at(c, i) = dy.at(ch_a + c, i);
}

double weighted_mse(const Tensor& pred, const Tensor& target, const std::vector<double>& weights,
                    Tensor& dpred) {
    if (!pred.same_shape(target)) throw TrainingError("weighted_mse: shape mismatch");
    const std::size_t n = pred.numel();
    dpred = Tensor(pred.shape);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i % weights.size()];
        const double e = pred.data[i] - target.data[i];
        loss += w * e * e;
        dpred.data[i] = 2.0 * w * e / static_cast<double>(n);
    }
    return loss / static_cast<double>(n);
}

} // namespace earcardio::nn
