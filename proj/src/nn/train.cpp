#include "earcardio/nn/train.hpp"

#include <algorithm>
#include <cmath>

#include "earcardio/util/parallel.hpp"
#include "earcardio/util/rng.hpp"

namespace earcardio::nn {

AdamOptimizer::AdamOptimizer(std::size_t n_params, const TrainConfig& cfg, std::size_t lo,
                             std::size_t hi)
    : m_(n_params, 0.0), v_(n_params, 0.0), cfg_(cfg), lo_(lo), hi_(std::min(hi, n_params)) {}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = lo_; i < hi_; ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
}

namespace {

// Shared mini-batch loop. SampleLossGrad(sample_index, grad_out) -> loss;
// called in parallel, one private grad buffer per sample, reduced in sample
// order afterwards.
template <typename LossGradFn>
TrainStats run_training(std::vector<double>& params, std::size_t n_params, std::size_t n_samples,
                        const TrainConfig& cfg, std::size_t opt_lo, std::size_t opt_hi,
                        LossGradFn&& loss_grad) {
    if (n_samples == 0) throw TrainingError("training: empty corpus");
    AdamOptimizer opt(n_params, cfg, opt_lo, opt_hi);
    TrainStats stats;

    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
    Rng shuffle_rng(cfg.seed);

    std::vector<std::vector<double>> sample_grads;
    std::vector<double> sample_loss;
    std::vector<double> grad(n_params, 0.0);
    std::vector<double> last_stable = params;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the deterministic generator
        for (std::size_t i = n_samples - 1; i > 0; --i) {
            auto j = static_cast<std::size_t>(shuffle_rng.uniform_int(i + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n_samples; start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t bn = std::min<std::size_t>(cfg.batch, n_samples - start);
            sample_grads.resize(bn);
            sample_loss.assign(bn, 0.0);
            par::parallel_for(bn, [&](std::size_t s) {
                auto& gbuf = sample_grads[s];
                gbuf.assign(n_params, 0.0);
                sample_loss[s] = loss_grad(order[start + s], gbuf);
            });
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t s = 0; s < bn; ++s) { // fixed-order reduction
                const auto& gbuf = sample_grads[s];
                for (std::size_t i = 0; i < n_params; ++i) grad[i] += gbuf[i];
                epoch_loss += sample_loss[s];
            }
            const double inv = 1.0 / static_cast<double>(bn);
            for (auto& v : grad) v *= inv;
            opt.step(params, grad);
        }
        epoch_loss /= static_cast<double>(n_samples);
        if (!std::isfinite(epoch_loss)) {
            params = last_stable;
            throw TrainingError("training diverged (non-finite loss) at epoch " +
                                std::to_string(epoch) + "; last stable weights restored");
        }
        last_stable = params;
        stats.epoch_loss.push_back(epoch_loss);
    }
    return stats;
}

} // namespace

TrainStats train_denoiser(DenoiserModel& model, const std::vector<DenoiserSample>& corpus,
                          const TrainConfig& cfg) {
    return run_training(
        model.params().values(), model.params().size(), corpus.size(), cfg, 0, SIZE_MAX,
        [&](std::size_t idx, GradBuf& g) {
            const auto& s = corpus[idx];
            DenoiserModel::Acts acts;
            auto pred = model.forward(s.input, acts);
            Tensor dpred;
            double loss = weighted_mse(pred, s.target, {}, dpred);
            model.backward(acts, dpred, g);
            return loss;
        });
}

namespace {

double recon_sample_loss(const ReconstructorModel& model, const ReconSample& s,
                         const RegionWeights& weights, GradBuf* g) {
    ReconstructorModel::Acts acts;
    auto pred = model.forward(s.input, acts);
    std::vector<double> w;
    if (model.head_spec().kind == "waveform")
        w = region_weight_vector(pred.numel(), s.peaks, weights, 100.0);
    Tensor dpred;
    double loss = weighted_mse(pred, s.target, w, dpred);
    if (g) model.backward(acts, dpred, *g);
    return loss;
}

} // namespace

TrainStats train_reconstructor(ReconstructorModel& model, const std::vector<ReconSample>& corpus,
                               const TrainConfig& cfg, const RegionWeights& weights) {
    return run_training(model.params().values(), model.params().size(), corpus.size(), cfg, 0,
                        SIZE_MAX, [&](std::size_t idx, GradBuf& g) {
                            return recon_sample_loss(model, corpus[idx], weights, &g);
                        });
}

TrainStats swap_task_head(ReconstructorModel& model, const TaskHeadSpec& new_head,
                          const std::vector<ReconSample>& fewshot_corpus, const TrainConfig& cfg,
                          const RegionWeights& weights, uint64_t head_seed) {
    if (fewshot_corpus.size() < 10)
        throw TrainingError("swap_task_head: need at least 10 few-shot windows");
    model.swap_head(new_head, head_seed);
    return run_training(model.params().values(), model.params().size(), fewshot_corpus.size(), cfg,
                        model.head_start_offset(), SIZE_MAX, [&](std::size_t idx, GradBuf& g) {
                            return recon_sample_loss(model, fewshot_corpus[idx], weights, &g);
                        });
}

double eval_denoiser(const DenoiserModel& model, const std::vector<DenoiserSample>& corpus) {
    if (corpus.empty()) throw TrainingError("eval_denoiser: empty corpus");
    std::vector<double> losses(corpus.size());
    par::parallel_for(corpus.size(), [&](std::size_t i) {
        DenoiserModel::Acts acts;
        auto pred = model.forward(corpus[i].input, acts);
        Tensor dpred;
        losses[i] = weighted_mse(pred, corpus[i].target, {}, dpred);
    });
    double acc = 0.0;
    for (double l : losses) acc += l;
    return acc / static_cast<double>(corpus.size());
}

double eval_reconstructor(const ReconstructorModel& model, const std::vector<ReconSample>& corpus,
                          const RegionWeights& weights) {
    if (corpus.empty()) throw TrainingError("eval_reconstructor: empty corpus");
    std::vector<double> losses(corpus.size());
    par::parallel_for(corpus.size(), [&](std::size_t i) {
        losses[i] = recon_sample_loss(model, corpus[i], weights, nullptr);
    });
    double acc = 0.0;
    for (double l : losses) acc += l;
    return acc / static_cast<double>(corpus.size());
}

} // namespace earcardio::nn
