#pragma once

#include <cstdint>

#include "earcardio/nn/denoiser.hpp"
#include "earcardio/nn/reconstructor.hpp"

namespace earcardio::nn {

struct TrainConfig {
    int epochs = 30;
    int batch = 16;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    uint64_t seed = 7; // shuffling; weight init comes from the model config
};

struct TrainStats {
    std::vector<double> epoch_loss; // mean loss per epoch, finite by contract
};

/// Adam over a slice of the flat parameter vector; [lo, hi) restricts updates
/// to the task head during fine-tuning.
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n_params, const TrainConfig& cfg, std::size_t lo = 0,
                  std::size_t hi = SIZE_MAX);
    void step(std::vector<double>& params, const std::vector<double>& grad);

private:
    std::vector<double> m_, v_;
    TrainConfig cfg_;
    std::size_t lo_, hi_;
    int t_ = 0;
};

struct DenoiserSample {
    EnhancerInput input;
    Tensor target; // clean 6 x T window
};

struct ReconSample {
    Tensor input;                    // 6 x T
    Tensor target;                   // 1 x 4T (waveform head) or 1 x out_dim (pooled)
    std::vector<std::size_t> peaks;  // ground-truth peak indices at the target rate
};

/// Mini-batch Adam on mean-squared error. Per-sample gradients are evaluated
/// in parallel and reduced in fixed sample order, so results are identical
/// with and without OpenMP and across reruns. Throws TrainingError (with the
/// last stable weights restored) if the loss turns non-finite.
TrainStats train_denoiser(DenoiserModel& model, const std::vector<DenoiserSample>& corpus,
                          const TrainConfig& cfg);

/// Same contract as train_denoiser but minimizing the region-focused loss.
TrainStats train_reconstructor(ReconstructorModel& model, const std::vector<ReconSample>& corpus,
                               const TrainConfig& cfg, const RegionWeights& weights = {});

/// Replace the final layer, freeze everything else, and fine-tune only the
/// head on the few-shot corpus. Non-head parameters are bit-identical before
/// and after.
TrainStats swap_task_head(ReconstructorModel& model, const TaskHeadSpec& new_head,
                          const std::vector<ReconSample>& fewshot_corpus, const TrainConfig& cfg,
                          const RegionWeights& weights = {}, uint64_t head_seed = 11);

/// Mean loss of the model over a corpus (no updates); used for held-out
/// evaluation.
double eval_denoiser(const DenoiserModel& model, const std::vector<DenoiserSample>& corpus);
double eval_reconstructor(const ReconstructorModel& model, const std::vector<ReconSample>& corpus,
                          const RegionWeights& weights = {});

} // namespace earcardio::nn
