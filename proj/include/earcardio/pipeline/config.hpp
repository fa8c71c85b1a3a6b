#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "earcardio/channel/ble.hpp"
#include "earcardio/synth/motion.hpp"

namespace earcardio::pipeline {

enum class Variant { interp_only, swt_interp, swt_ensemble, swt_neural, full };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// One experiment, fully determined by this document: corpus synthesis knobs,
/// channel scenario, pipeline variant, and training hyperparameters. The seed
/// is mandatory; there is no implicit entropy anywhere downstream.
struct ExperimentConfig {
    uint64_t seed = 0;
    std::string output_dir = "out";

    // population
    int subjects = 10;
    double duration_s = 60.0;

    // motion kinds cycled across subjects
    std::vector<synth::MotionKind> motion_kinds;

    // channel
    LossScenario scenario;

    // windowing
    double window_s = 5.0;
    double hop_s = 2.5;

    Variant variant = Variant::full;

    // training
    int folds = 5;
    int fold = 0; // held-out fold index
    int epochs = 30;
    int batch = 16;
    double lr = 1e-3;
    double mask_loss_max = 0.5; // training masks drawn from [0, this]
    int denoiser_attn_dim = 16;
    int denoiser_enc1 = 24;
    int denoiser_enc2 = 48;
    int recon_feat = 32;
    int recon_blocks = 2;
    int recon_up = 16;
    double region_alpha = 4.0;
    double region_delta_ms = 50.0;

    std::string config_hash; // filled when parsed

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string canonical_json() const;

    /// Output directory after the EARCARDIO_OUT override.
    std::string resolved_output_dir() const;
};

inline constexpr const char* kVersionString = "earcardio 1.0.0";

} // namespace earcardio::pipeline
