#pragma once

#include <string>

#include "earcardio/nn/denoiser.hpp"
#include "earcardio/nn/reconstructor.hpp"

namespace earcardio::nn {

// Checkpoints are self-describing JSON: versioned header, architecture
// hyperparameters, training seed, and the named parameter tensors. Writing is
// byte-deterministic for identical weights.

void save_denoiser(const std::string& path, const DenoiserModel& model, uint64_t train_seed);
DenoiserModel load_denoiser(const std::string& path);

void save_reconstructor(const std::string& path, const ReconstructorModel& model,
                        uint64_t train_seed);
ReconstructorModel load_reconstructor(const std::string& path);

} // namespace earcardio::nn
