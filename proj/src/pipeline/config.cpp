#include "earcardio/pipeline/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "earcardio/util/hash.hpp"

namespace earcardio::pipeline {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::interp_only: return "interp-only";
        case Variant::swt_interp: return "swt+interp";
        case Variant::swt_ensemble: return "swt+ensemble";
        case Variant::swt_neural: return "swt+neural";
        case Variant::full: return "full";
    }
    return "full";
}

Variant variant_from_name(const std::string& name) {
    for (auto v : {Variant::interp_only, Variant::swt_interp, Variant::swt_ensemble,
                   Variant::swt_neural, Variant::full})
        if (name == variant_name(v)) return v;
    throw ConfigError("config: unknown pipeline variant '" + name + "'");
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config: bad value at " + path + "." + key);
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig c;
    if (!j.contains("seed")) throw ConfigError("config: .seed is mandatory (no implicit entropy)");
    c.seed = j.at("seed").get<uint64_t>();
    c.output_dir = field<std::string>(j, "", "output_dir", c.output_dir);

    if (j.contains("population")) {
        const auto& p = j.at("population");
        c.subjects = field<int>(p, "population", "subjects", c.subjects);
        c.duration_s = field<double>(p, "population", "duration_s", c.duration_s);
        if (c.subjects < 1) throw ConfigError("config: population.subjects must be >= 1");
        if (c.duration_s < 10.0) throw ConfigError("config: population.duration_s must be >= 10");
    }

    if (j.contains("motion") && j.at("motion").contains("kinds")) {
        for (const auto& kj : j.at("motion").at("kinds")) {
            synth::MotionKind k;
            if (kj.is_string()) {
                k = synth::MotionKind::preset(synth::motion_tag_from_name(kj.get<std::string>()));
            } else {
                k.tag = synth::motion_tag_from_name(field<std::string>(kj, "motion.kinds[]", "tag", "custom"));
                auto base = synth::MotionKind::preset(k.tag);
                k.band_lo_hz = field<double>(kj, "motion.kinds[]", "band_lo_hz", base.band_lo_hz);
                k.band_hi_hz = field<double>(kj, "motion.kinds[]", "band_hi_hz", base.band_hi_hz);
                k.intensity_ratio =
                    field<double>(kj, "motion.kinds[]", "intensity_ratio", base.intensity_ratio);
            }
            try {
                k.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config: motion.kinds[]: ") + e.what());
            }
            c.motion_kinds.push_back(k);
        }
    }
    if (c.motion_kinds.empty())
        c.motion_kinds.push_back(synth::MotionKind::preset(synth::MotionTag::speak));

    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        auto tag = field<std::string>(ch, "channel", "scenario", std::string("lossless"));
        c.scenario = LossScenario::preset(tag);
        if (tag == "custom") {
            c.scenario.iid_loss_p = field<double>(ch, "channel", "iid_loss_p", 0.0);
            if (ch.contains("burst")) {
                c.scenario.burst_enabled = true;
                c.scenario.burst_enter_p = field<double>(ch.at("burst"), "channel.burst", "enter_p", 0.01);
                c.scenario.burst_len_mean =
                    field<double>(ch.at("burst"), "channel.burst", "len_mean", 3.0);
            }
        }
        c.scenario.validate();
    } else {
        c.scenario = LossScenario::preset("lossless");
    }

    if (j.contains("window")) {
        c.window_s = field<double>(j.at("window"), "window", "window_s", c.window_s);
        c.hop_s = field<double>(j.at("window"), "window", "hop_s", c.hop_s);
        if (c.window_s < 1.0) throw ConfigError("config: window.window_s must be >= 1");
        if (c.hop_s <= 0.0 || c.hop_s > c.window_s)
            throw ConfigError("config: window.hop_s must be in (0, window_s]");
    }

    c.variant = variant_from_name(field<std::string>(j, "", "variant", std::string("full")));

    if (j.contains("training")) {
        const auto& t = j.at("training");
        c.folds = field<int>(t, "training", "folds", c.folds);
        c.fold = field<int>(t, "training", "fold", c.fold);
        c.epochs = field<int>(t, "training", "epochs", c.epochs);
        c.batch = field<int>(t, "training", "batch", c.batch);
        c.lr = field<double>(t, "training", "lr", c.lr);
        c.mask_loss_max = field<double>(t, "training", "mask_loss_max", c.mask_loss_max);
        c.denoiser_attn_dim = field<int>(t, "training", "denoiser_attn_dim", c.denoiser_attn_dim);
        c.denoiser_enc1 = field<int>(t, "training", "denoiser_enc1", c.denoiser_enc1);
        c.denoiser_enc2 = field<int>(t, "training", "denoiser_enc2", c.denoiser_enc2);
        c.recon_feat = field<int>(t, "training", "recon_feat", c.recon_feat);
        c.recon_blocks = field<int>(t, "training", "recon_blocks", c.recon_blocks);
        c.recon_up = field<int>(t, "training", "recon_up", c.recon_up);
        c.region_alpha = field<double>(t, "training", "region_alpha", c.region_alpha);
        c.region_delta_ms = field<double>(t, "training", "region_delta_ms", c.region_delta_ms);
        if (c.folds < 1) throw ConfigError("config: training.folds must be >= 1");
        if (c.fold < 0 || c.fold >= c.folds)
            throw ConfigError("config: training.fold must be in [0, folds)");
        if (c.epochs < 1 || c.batch < 1) throw ConfigError("config: training sizes must be >= 1");
        if (c.mask_loss_max < 0.0 || c.mask_loss_max > 1.0)
            throw ConfigError("config: training.mask_loss_max must be in [0,1]");
    }

    c.config_hash = fnv1a64_hex(c.canonical_json());
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::canonical_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["population"] = {{"subjects", subjects}, {"duration_s", duration_s}};
    auto kinds = nlohmann::ordered_json::array();
    for (const auto& k : motion_kinds)
        kinds.push_back({{"tag", synth::motion_tag_name(k.tag)},
                         {"band_lo_hz", k.band_lo_hz},
                         {"band_hi_hz", k.band_hi_hz},
                         {"intensity_ratio", k.intensity_ratio}});
    j["motion"] = {{"kinds", kinds}};
    j["channel"] = {{"scenario", scenario.tag},
                    {"iid_loss_p", scenario.iid_loss_p},
                    {"burst_enabled", scenario.burst_enabled},
                    {"burst_enter_p", scenario.burst_enter_p},
                    {"burst_len_mean", scenario.burst_len_mean}};
    j["window"] = {{"window_s", window_s}, {"hop_s", hop_s}};
    j["variant"] = variant_name(variant);
    j["training"] = {{"folds", folds},
                     {"fold", fold},
                     {"epochs", epochs},
                     {"batch", batch},
                     {"lr", lr},
                     {"mask_loss_max", mask_loss_max},
                     {"denoiser_attn_dim", denoiser_attn_dim},
                     {"denoiser_enc1", denoiser_enc1},
                     {"denoiser_enc2", denoiser_enc2},
                     {"recon_feat", recon_feat},
                     {"recon_blocks", recon_blocks},
                     {"recon_up", recon_up},
                     {"region_alpha", region_alpha},
                     {"region_delta_ms", region_delta_ms}};
    return j.dump();
}

std::string ExperimentConfig::resolved_output_dir() const {
    if (const char* env = std::getenv("EARCARDIO_OUT"); env != nullptr && env[0] != '\0')
        return env;
    return output_dir;
}

} // namespace earcardio::pipeline
