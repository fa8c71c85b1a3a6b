#include "earcardio/pipeline/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "earcardio/core/beats.hpp"
#include "earcardio/core/csv.hpp"
#include "earcardio/core/interp.hpp"
#include "earcardio/dsp/swt.hpp"
#include "earcardio/nn/train.hpp"
#include "earcardio/util/hash.hpp"
#include "earcardio/util/parallel.hpp"
#include "earcardio/util/rng.hpp"

namespace fs = std::filesystem;

namespace earcardio::pipeline {

namespace {

std::string subject_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%03d", i);
    return buf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile_of(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
    return v[idx];
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

} // namespace

nn::Tensor series_to_tensor(const ImuSeries& s) {
    nn::Tensor t({kNumChannels, static_cast<int>(s.size())});
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < s.size(); ++i) t.at(c, static_cast<int>(i)) = s.value(c, i);
    return t;
}

double window_norm_gain(const nn::Tensor& window) {
    double acc = 0.0;
    for (double v : window.data) acc += v * v;
    double rms = std::sqrt(acc / static_cast<double>(window.numel()));
    return rms > 1e-12 ? 1.0 / rms : 1.0;
}

// ---- manifest ----------------------------------------------------------------

void Manifest::write(const std::string& dir) const {
    nlohmann::ordered_json j;
    j["format"] = "earcardio-corpus";
    j["version"] = version;
    j["config_hash"] = config_hash;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        arr.push_back({{"id", e.id},
                       {"subject", e.subject},
                       {"motion_kind", e.motion_kind},
                       {"clean", e.clean_csv},
                       {"motion", e.motion_csv},
                       {"mixed", e.mixed_csv},
                       {"ground_truth", e.gt_json}});
    }
    j["entries"] = std::move(arr);
    std::ofstream f(fs::path(dir) / "manifest.json");
    if (!f) throw DataError("manifest: cannot write to " + dir);
    f << j.dump(2) << "\n";
}

Manifest Manifest::read(const std::string& dir) {
    std::ifstream f(fs::path(dir) / "manifest.json");
    if (!f) throw DataError("manifest: cannot open " + (fs::path(dir) / "manifest.json").string());
    nlohmann::json j = nlohmann::json::parse(f);
    if (j.value("format", "") != "earcardio-corpus")
        throw DataError("manifest: unrecognized format in " + dir);
    Manifest m;
    m.version = j.value("version", "");
    m.config_hash = j.value("config_hash", "");
    for (const auto& ej : j.at("entries")) {
        CorpusEntry e;
        e.id = ej.at("id").get<std::string>();
        e.subject = ej.at("subject").get<int>();
        e.motion_kind = ej.at("motion_kind").get<std::string>();
        auto join = [&](const std::string& rel) { return (fs::path(dir) / rel).string(); };
        e.clean_csv = join(ej.at("clean").get<std::string>());
        e.motion_csv = join(ej.at("motion").get<std::string>());
        e.mixed_csv = join(ej.at("mixed").get<std::string>());
        e.gt_json = join(ej.at("ground_truth").get<std::string>());
        m.entries.push_back(std::move(e));
    }
    return m;
}

// ---- synth ---------------------------------------------------------------------

Manifest cmd_synth(const ExperimentConfig& cfg) {
    const fs::path out = fs::path(cfg.resolved_output_dir()) / "corpus";
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("synth: cannot create output directory " + out.string());

    auto profiles = synth::sample_population(static_cast<std::size_t>(cfg.subjects), cfg.seed);

    Manifest manifest;
    manifest.version = kVersionString;
    manifest.config_hash = cfg.config_hash;
    manifest.entries.resize(static_cast<std::size_t>(cfg.subjects));

    par::parallel_for(static_cast<std::size_t>(cfg.subjects), [&](std::size_t i) {
        const auto id = subject_id(static_cast<int>(i));
        auto [obs, gt] = synth_subject(mix_seed(cfg.seed, 1000 + i), cfg.duration_s, profiles[i]);
        const auto& kind = cfg.motion_kinds[i % cfg.motion_kinds.size()];
        auto motion = synth::synth_motion(kind, cfg.duration_s, mix_seed(cfg.seed, 2000 + i));
        auto mixed = synth::mix(obs, motion);

        CorpusEntry e;
        e.id = id;
        e.subject = static_cast<int>(i);
        e.motion_kind = synth::motion_tag_name(kind.tag);
        e.clean_csv = id + "_clean.csv";
        e.motion_csv = id + "_motion.csv";
        e.mixed_csv = id + "_mixed.csv";
        e.gt_json = id + "_gt.json";
        write_trace_csv((out / e.clean_csv).string(), obs);
        write_trace_csv((out / e.motion_csv).string(), motion);
        write_trace_csv((out / e.mixed_csv).string(), mixed.observed);
        synth::write_ground_truth_json((out / e.gt_json).string(), gt, profiles[i]);
        manifest.entries[i] = std::move(e);
    });
    manifest.write(out.string());
    return Manifest::read(out.string());
}

// ---- training corpora -----------------------------------------------------------

std::vector<int> fold_assignment(std::size_t n_subjects, int folds, uint64_t seed) {
    std::vector<std::size_t> order(n_subjects);
    for (std::size_t i = 0; i < n_subjects; ++i) order[i] = i;
    Rng rng(mix_seed(seed, 777));
    for (std::size_t i = n_subjects - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(rng.uniform_int(i + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<int> fold(n_subjects, 0);
    for (std::size_t pos = 0; pos < n_subjects; ++pos)
        fold[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    return fold;
}

namespace {

struct TrainWindows {
    std::vector<nn::DenoiserSample> denoiser;
    // per-window raw pieces for the reconstructor stage
    std::vector<ImuSeries> masked_windows;
    std::vector<nn::Tensor> scg_targets;            // 1 x 500
    std::vector<std::vector<std::size_t>> scg_peaks;
};

ImuSeries slice_by_ms(const ImuSeries& s, int64_t start_ms, std::size_t n_slots) {
    const double slot_ms = 1000.0 / s.rate_hz();
    auto idx = static_cast<std::size_t>(
        std::floor(static_cast<double>(start_ms - s.start_ms()) / slot_ms + 0.5));
    return s.slice(idx, n_slots);
}

// Build masked/interpolated/SWT training windows with random loss patterns in
// [0, mask_loss_max], mirroring the runtime path.
TrainWindows build_training_windows(const ExperimentConfig& cfg,
                                    const std::vector<CorpusEntry>& entries) {
    TrainWindows tw;
    std::size_t counter = 0;
    for (const auto& e : entries) {
        auto mixed = read_trace_csv(e.mixed_csv);
        auto gt = synth::read_ground_truth_json(e.gt_json);
        auto clean25 = gt.clean_observation_25hz();
        auto windows = series_windows(mixed, cfg.window_s, cfg.hop_s);
        for (const auto& w : windows) {
            Rng rng(mix_seed(cfg.seed, 31000 + counter));
            ++counter;
            const double p = rng.uniform(0.0, cfg.mask_loss_max);
            ImuSeries masked = w.window;
            for (std::size_t i = 0; i < masked.size(); ++i) {
                if (rng.uniform01() < p) {
                    masked.set_present(i, false);
                    for (int c = 0; c < kNumChannels; ++c) masked.set_value(c, i, 0.0);
                }
            }
            if (masked.present_count() < 2) continue;

            auto interp = linear_interpolate(masked);
            auto swt = dsp::swt_denoise_series(interp);
            auto x = series_to_tensor(swt);
            const double gain = window_norm_gain(x);
            for (auto& v : x.data) v *= gain;

            nn::EnhancerInput in;
            in.window = std::move(x);
            in.mask.resize(masked.size());
            for (std::size_t i = 0; i < masked.size(); ++i)
                in.mask[i] = masked.present(i) ? 1.0 : 0.0;

            auto clean_win = slice_by_ms(clean25, w.window.start_ms(), w.window.size());
            auto target = series_to_tensor(clean_win);
            for (auto& v : target.data) v *= gain;

            tw.denoiser.push_back({in, target});
            tw.masked_windows.push_back(masked);

            const auto n100 = w.window.size() * 4;
            const auto start_idx = static_cast<std::size_t>(w.window.start_ms() / 10);
            nn::Tensor scg({1, static_cast<int>(n100)});
            for (std::size_t i = 0; i < n100; ++i)
                scg.at(0, static_cast<int>(i)) = gt.scg_ref[start_idx + i];
            tw.scg_targets.push_back(std::move(scg));
            tw.scg_peaks.push_back(scg_peak_indices(gt.scg_ref, gt.scg_rate_hz, gt.beat_onsets_ms,
                                                    w.window.start_ms(), n100));
        }
    }
    return tw;
}

void write_loss_csv(const std::string& path, const nn::TrainStats& stats) {
    std::ofstream f(path);
    if (!f) throw DataError("train: cannot write " + path);
    f << "epoch,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < stats.epoch_loss.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, stats.epoch_loss[i]);
        f << buf;
    }
}

} // namespace

std::vector<std::size_t> scg_peak_indices(const std::vector<double>& scg, double rate_hz,
                                          const std::vector<int64_t>& onsets_ms,
                                          int64_t seg_start_ms, std::size_t seg_len) {
    std::vector<std::size_t> peaks;
    const double slot_ms = 1000.0 / rate_hz;
    const auto seg_start = static_cast<std::size_t>(
        std::floor(static_cast<double>(seg_start_ms) / slot_ms + 0.5));
    for (std::size_t b = 0; b < onsets_ms.size(); ++b) {
        const auto on = static_cast<std::size_t>(
            std::floor(static_cast<double>(onsets_ms[b]) / slot_ms + 0.5));
        const std::size_t next = b + 1 < onsets_ms.size()
                                     ? static_cast<std::size_t>(std::floor(
                                           static_cast<double>(onsets_ms[b + 1]) / slot_ms + 0.5))
                                     : on + static_cast<std::size_t>(1000.0 / slot_ms);
        if (on >= seg_start + seg_len || next <= seg_start) continue;
        const std::size_t lo = std::max(on, seg_start);
        const std::size_t hi = std::min({next, seg_start + seg_len, scg.size()});
        if (lo >= hi) continue;
        std::size_t best = lo;
        for (std::size_t i = lo; i < hi; ++i)
            if (std::abs(scg[i]) > std::abs(scg[best])) best = i;
        peaks.push_back(best - seg_start);
    }
    return peaks;
}

std::string cmd_train(const ExperimentConfig& cfg, const std::string& corpus_dir,
                      const std::string& stage) {
    if (stage != "denoiser" && stage != "reconstructor")
        throw ConfigError("train: stage must be 'denoiser' or 'reconstructor', got '" + stage + "'");
    auto manifest = Manifest::read(corpus_dir);
    const auto n_subjects = manifest.entries.size();
    if (n_subjects < static_cast<std::size_t>(cfg.folds))
        throw DataError("train: corpus has fewer subjects than requested folds");

    auto folds = fold_assignment(n_subjects, cfg.folds, cfg.seed);
    std::vector<CorpusEntry> train_entries;
    for (std::size_t i = 0; i < n_subjects; ++i)
        if (folds[static_cast<std::size_t>(manifest.entries[i].subject)] != cfg.fold)
            train_entries.push_back(manifest.entries[i]);
    if (train_entries.empty()) throw DataError("train: no training subjects left after fold split");

    auto tw = build_training_windows(cfg, train_entries);
    if (tw.denoiser.size() < 20)
        throw DataError("train: training corpus too small (" + std::to_string(tw.denoiser.size()) +
                        " windows)");

    const fs::path out = fs::path(cfg.resolved_output_dir());
    std::error_code ec;
    fs::create_directories(out, ec);

    nn::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch = cfg.batch;
    tc.lr = cfg.lr;
    tc.seed = mix_seed(cfg.seed, 502);

    if (stage == "denoiser") {
        nn::DenoiserConfig dc;
        dc.attn_dim = cfg.denoiser_attn_dim;
        dc.enc1_ch = cfg.denoiser_enc1;
        dc.enc2_ch = cfg.denoiser_enc2;
        dc.seed = mix_seed(cfg.seed, 501);
        nn::DenoiserModel model(dc);
        auto stats = nn::train_denoiser(model, tw.denoiser, tc);
        const auto ckpt = (out / "denoiser.ckpt.json").string();
        nn::save_denoiser(ckpt, model, tc.seed);
        write_loss_csv((out / "denoiser_loss.csv").string(), stats);
        return ckpt;
    }

    // reconstructor: trains on the denoiser's outputs, so that checkpoint must
    // exist first
    const auto den_path = (out / "denoiser.ckpt.json").string();
    if (!fs::exists(den_path))
        throw DataError("train: missing denoiser checkpoint " + den_path +
                        "; run `earcardio train --stage denoiser` first");
    auto denoiser = nn::load_denoiser(den_path);

    std::vector<nn::ReconSample> corpus(tw.denoiser.size());
    par::parallel_for(tw.denoiser.size(), [&](std::size_t i) {
        nn::DenoiserModel::Acts acts;
        nn::ReconSample s;
        s.input = denoiser.forward(tw.denoiser[i].input, acts);
        s.target = tw.scg_targets[i];
        s.peaks = tw.scg_peaks[i];
        corpus[i] = std::move(s);
    });

    nn::ReconstructorConfig rc;
    rc.feat_ch = cfg.recon_feat;
    rc.n_blocks = cfg.recon_blocks;
    rc.up_ch = cfg.recon_up;
    rc.seed = mix_seed(cfg.seed, 503);
    nn::ReconstructorModel model(rc);
    nn::RegionWeights rw{cfg.region_alpha, cfg.region_delta_ms};
    auto stats = nn::train_reconstructor(model, corpus, tc, rw);
    const auto ckpt = (out / "reconstructor.ckpt.json").string();
    nn::save_reconstructor(ckpt, model, tc.seed);
    write_loss_csv((out / "reconstructor_loss.csv").string(), stats);
    return ckpt;
}

// ---- run -------------------------------------------------------------------------

WindowOutput process_window(const ImuSeries& window, Variant variant,
                            const nn::DenoiserModel* denoiser,
                            const nn::ReconstructorModel* recon) {
    WindowOutput out;
    auto interp = linear_interpolate(window);
    if (variant == Variant::interp_only) {
        out.enhanced = series_to_tensor(interp);
        return out;
    }
    auto swt = dsp::swt_denoise_series(interp);
    auto xs = series_to_tensor(swt);
    if (variant == Variant::swt_interp) {
        out.enhanced = std::move(xs);
        return out;
    }

    std::vector<double> mask(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) mask[i] = window.present(i) ? 1.0 : 0.0;

    if (variant == Variant::swt_ensemble) {
        const int best = nn::rank_best_channel(xs, window.rate_hz());
        std::vector<double> ch(xs.shape[1]);
        for (int t = 0; t < xs.shape[1]; ++t) ch[static_cast<std::size_t>(t)] = xs.at(best, t);
        auto seg = segment_beats(ch, window.rate_hz());
        nn::EnhancerInput in{xs, mask};
        auto res = nn::ensemble_refine(in, seg, window.rate_hz());
        out.enhanced = std::move(res.window);
        out.ensemble_degraded = res.degraded;
        return out;
    }

    // neural variants run in the normalized domain
    const double gain = window_norm_gain(xs);
    nn::EnhancerInput in;
    in.window = xs;
    for (auto& v : in.window.data) v *= gain;
    in.mask = mask;
    nn::DenoiserModel::Acts acts;
    auto y = denoiser->forward(in, acts);

    if (variant == Variant::full) out.scg = nn::reconstruct_window(*recon, y);

    out.enhanced = std::move(y);
    for (auto& v : out.enhanced.data) v /= gain;
    return out;
}

namespace {

struct GtContext {
    synth::GroundTruth gt;
    ImuSeries clean25; // noiseless
};

// similarity/SOI/HR metrics of one kept window against its ground truth
void window_metrics(WindowRecord& rec, const WindowOutput& out, const ImuSeries& window,
                    const GtContext& gtc, Variant variant) {
    const int64_t start_ms = window.start_ms();
    const auto n25 = window.size();

    if (variant == Variant::full && out.scg.has_value()) {
        const auto& scg = *out.scg;
        const auto n100 = n25 * 4;
        const auto start_idx = static_cast<std::size_t>(start_ms / 10);
        std::vector<double> truth(gtc.gt.scg_ref.begin() + static_cast<long>(start_idx),
                                  gtc.gt.scg_ref.begin() + static_cast<long>(start_idx + n100));
        rec.similarity = metrics::cosine_similarity(scg.samples, truth);
        rec.soi = metrics::soi(scg.samples, truth, scg.rate_hz);
        // HR from the reconstructed waveform
        if (scg.beat_annotations.size() >= 2) {
            auto ibis = ibis_from_peaks(scg.beat_annotations, scg.rate_hz);
            rec.ibi_est_ms = median_of(ibis);
            rec.hr_est = 60000.0 / mean_of(ibis);
            rec.hr_valid = true;
        }
    } else {
        auto clean_win = slice_by_ms(gtc.clean25, start_ms, n25);
        auto ref = series_to_tensor(clean_win);
        // mean cosine over channels with signal on both sides
        double acc = 0.0;
        int used = 0;
        for (int c = 0; c < kNumChannels; ++c) {
            double no = 0.0, nr = 0.0, dot = 0.0;
            for (int t = 0; t < ref.shape[1]; ++t) {
                const double a = out.enhanced.at(c, t), b = ref.at(c, t);
                no += a * a;
                nr += b * b;
                dot += a * b;
            }
            if (no > 0.0 && nr > 0.0) {
                acc += dot / std::sqrt(no * nr);
                ++used;
            }
        }
        rec.similarity = used > 0 ? acc / used : 0.0;
        // SOI and HR on the strongest reference channel
        int best = 0;
        double best_p = -1.0;
        for (int c = 0; c < kNumChannels; ++c) {
            double p = 0.0;
            for (int t = 0; t < ref.shape[1]; ++t) p += ref.at(c, t) * ref.at(c, t);
            if (p > best_p) {
                best_p = p;
                best = c;
            }
        }
        std::vector<double> est_ch(out.enhanced.shape[1]), ref_ch(ref.shape[1]);
        for (int t = 0; t < ref.shape[1]; ++t) {
            est_ch[static_cast<std::size_t>(t)] = out.enhanced.at(best, t);
            ref_ch[static_cast<std::size_t>(t)] = ref.at(best, t);
        }
        rec.soi = metrics::soi(est_ch, ref_ch, window.rate_hz());
        auto seg = segment_beats(est_ch, window.rate_hz());
        if (seg.size() >= 2) {
            auto ibis = ibis_from_peaks(seg.peak_indices, window.rate_hz());
            rec.ibi_est_ms = median_of(ibis);
            rec.hr_est = 60000.0 / mean_of(ibis);
            rec.hr_valid = true;
        }
    }

    // ground-truth HR/IBI from the generator's beat schedule inside the window
    std::vector<double> gt_ibis;
    const int64_t end_ms = start_ms + static_cast<int64_t>(n25 * 40);
    int64_t prev = -1;
    for (auto on : gtc.gt.beat_onsets_ms) {
        if (on < start_ms || on >= end_ms) continue;
        if (prev >= 0) gt_ibis.push_back(static_cast<double>(on - prev));
        prev = on;
    }
    if (gt_ibis.empty() || !rec.hr_valid) {
        rec.hr_valid = false;
        return;
    }
    rec.hr_truth = 60000.0 / mean_of(gt_ibis);
    rec.ibi_truth_ms = median_of(gt_ibis);
    rec.mpe_hr = metrics::mpe({rec.hr_est}, {rec.hr_truth});
    rec.mpe_ibi = metrics::mpe({rec.ibi_est_ms}, {rec.ibi_truth_ms});
}

nlohmann::ordered_json record_to_json(const WindowRecord& r) {
    nlohmann::ordered_json j;
    j["trace"] = r.trace_id;
    j["window"] = r.window_index;
    j["discarded"] = r.discarded;
    j["loss_rate"] = r.loss_rate;
    if (!r.discarded) {
        j["similarity"] = r.similarity;
        j["soi"] = r.soi;
        j["hr_valid"] = r.hr_valid;
        if (r.hr_valid) {
            j["hr_est"] = r.hr_est;
            j["hr_truth"] = r.hr_truth;
            j["ibi_est_ms"] = r.ibi_est_ms;
            j["ibi_truth_ms"] = r.ibi_truth_ms;
            j["mpe_hr_pct"] = r.mpe_hr;
            j["mpe_ibi_pct"] = r.mpe_ibi;
        }
    }
    return j;
}

} // namespace

RunSummary cmd_run(const ExperimentConfig& cfg, const std::string& corpus_dir) {
    auto manifest = Manifest::read(corpus_dir);

    std::optional<nn::DenoiserModel> denoiser;
    std::optional<nn::ReconstructorModel> recon;
    const fs::path out(cfg.resolved_output_dir());
    if (cfg.variant == Variant::swt_neural || cfg.variant == Variant::full) {
        const auto p = (out / "denoiser.ckpt.json").string();
        if (!fs::exists(p))
            throw DataError("run: missing denoiser checkpoint " + p +
                            "; run `earcardio train --stage denoiser` first");
        denoiser.emplace(nn::load_denoiser(p));
    }
    if (cfg.variant == Variant::full) {
        const auto p = (out / "reconstructor.ckpt.json").string();
        if (!fs::exists(p))
            throw DataError("run: missing reconstructor checkpoint " + p +
                            "; run `earcardio train --stage reconstructor` first");
        recon.emplace(nn::load_reconstructor(p));
    }

    std::vector<std::vector<WindowRecord>> per_entry(manifest.entries.size());
    par::parallel_for(manifest.entries.size(), [&](std::size_t ei) {
        const auto& e = manifest.entries[ei];
        GtContext gtc{synth::read_ground_truth_json(e.gt_json), {}};
        gtc.clean25 = gtc.gt.clean_observation_25hz();
        auto mixed = read_trace_csv(e.mixed_csv);

        auto tx = transmit(mixed, cfg.scenario, mix_seed(cfg.seed, 41000 + ei));
        if (tx.trace.packets.size() < 2) return; // entire trace lost
        auto windows = replay_windows(tx.trace, cfg.window_s, cfg.hop_s);

        auto& records = per_entry[ei];
        for (std::size_t wi = 0; wi < windows.size(); ++wi) {
            const auto& w = windows[wi];
            WindowRecord rec;
            rec.trace_id = e.id;
            rec.window_index = wi;
            rec.loss_rate = w.report.loss_rate;
            rec.discarded = w.discard;
            if (!rec.discarded) {
                auto wout = process_window(w.window, cfg.variant, denoiser ? &*denoiser : nullptr,
                                           recon ? &*recon : nullptr);
                rec.ensemble_degraded = wout.ensemble_degraded;
                window_metrics(rec, wout, w.window, gtc, cfg.variant);
            }
            records.push_back(std::move(rec));
        }
    });

    // deterministic flattening in manifest order
    std::vector<WindowRecord> records;
    for (auto& v : per_entry)
        for (auto& r : v) records.push_back(std::move(r));

    RunSummary s;
    s.variant = variant_name(cfg.variant);
    s.scenario = cfg.scenario.tag;
    s.config_hash = cfg.config_hash;
    s.windows_total = records.size();
    std::vector<double> sim, soi_v, mpe_hr, mpe_ibi;
    for (const auto& r : records) {
        if (r.discarded) continue;
        ++s.windows_kept;
        sim.push_back(r.similarity);
        soi_v.push_back(r.soi);
        if (r.hr_valid) {
            ++s.windows_hr_valid;
            mpe_hr.push_back(r.mpe_hr);
            mpe_ibi.push_back(r.mpe_ibi);
        }
    }
    s.discard_rate = s.windows_total == 0
                         ? 0.0
                         : 1.0 - static_cast<double>(s.windows_kept) / static_cast<double>(s.windows_total);
    s.similarity_mean = mean_of(sim);
    s.similarity_median = median_of(sim);
    s.similarity_p10 = percentile_of(sim, 0.10);
    s.soi_mean = mean_of(soi_v);
    s.soi_median = median_of(soi_v);
    s.soi_p10 = percentile_of(soi_v, 0.10);
    s.mpe_hr_mean = mean_of(mpe_hr);
    s.mpe_hr_median = median_of(mpe_hr);
    s.mpe_ibi_mean = mean_of(mpe_ibi);
    s.mpe_ibi_median = median_of(mpe_ibi);

    // results on disk
    const fs::path rdir = out / "results" / (std::string(variant_name(cfg.variant)) + "_" + cfg.scenario.tag);
    std::error_code ec;
    fs::create_directories(rdir, ec);
    s.results_dir = rdir.string();
    {
        std::ofstream f(rdir / "windows.jsonl");
        if (!f) throw DataError("run: cannot write " + (rdir / "windows.jsonl").string());
        for (const auto& r : records) f << record_to_json(r).dump() << "\n";
    }
    {
        nlohmann::ordered_json j;
        j["version"] = kVersionString;
        j["config_hash"] = s.config_hash;
        j["variant"] = s.variant;
        j["scenario"] = s.scenario;
        j["estimator"] = {{"welch_segment_s", 2.0}, {"welch_overlap", 0.5}, {"welch_window", "hann"},
                          {"window_s", cfg.window_s}, {"hop_s", cfg.hop_s}};
        j["windows_total"] = s.windows_total;
        j["windows_kept"] = s.windows_kept;
        j["windows_hr_valid"] = s.windows_hr_valid;
        j["discard_rate"] = s.discard_rate;
        j["similarity"] = {{"mean", s.similarity_mean}, {"median", s.similarity_median}, {"p10", s.similarity_p10}};
        j["soi"] = {{"mean", s.soi_mean}, {"median", s.soi_median}, {"p10", s.soi_p10}};
        j["mpe_hr_pct"] = {{"mean", s.mpe_hr_mean}, {"median", s.mpe_hr_median}};
        j["mpe_ibi_pct"] = {{"mean", s.mpe_ibi_mean}, {"median", s.mpe_ibi_median}};
        std::ofstream f(rdir / "summary.json");
        if (!f) throw DataError("run: cannot write " + (rdir / "summary.json").string());
        f << j.dump(2) << "\n";
    }
    return s;
}

// ---- report -------------------------------------------------------------------

std::string cmd_report(const std::string& results_dir) {
    std::vector<fs::path> dirs;
    if (fs::exists(results_dir)) {
        for (const auto& d : fs::directory_iterator(results_dir))
            if (d.is_directory() && fs::exists(d.path() / "summary.json")) dirs.push_back(d.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw DataError("report: no result sets under " + results_dir);

    std::ostringstream csv, txt;
    csv << "variant,scenario,windows,kept,discard_rate,similarity,soi,mpe_hr_pct,mpe_ibi_pct\n";
    txt << "run results (" << kVersionString << ")\n";
    char buf[512];
    for (const auto& d : dirs) {
        std::ifstream f(d / "summary.json");
        nlohmann::json j = nlohmann::json::parse(f);
        std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%zu,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      j.at("variant").get<std::string>().c_str(),
                      j.at("scenario").get<std::string>().c_str(),
                      j.at("windows_total").get<std::size_t>(),
                      j.at("windows_kept").get<std::size_t>(),
                      j.at("discard_rate").get<double>(),
                      j.at("similarity").at("mean").get<double>(),
                      j.at("soi").at("mean").get<double>(),
                      j.at("mpe_hr_pct").at("mean").get<double>(),
                      j.at("mpe_ibi_pct").at("mean").get<double>());
        csv << buf;
        std::snprintf(buf, sizeof(buf),
                      "  %-14s %-14s windows=%-4zu discard=%.1f%%  sim=%.3f soi=%.3f  "
                      "MPE(HR)=%.2f%% MPE(IBI)=%.2f%% [config %s]\n",
                      j.at("variant").get<std::string>().c_str(),
                      j.at("scenario").get<std::string>().c_str(),
                      j.at("windows_total").get<std::size_t>(),
                      100.0 * j.at("discard_rate").get<double>(),
                      j.at("similarity").at("mean").get<double>(),
                      j.at("soi").at("mean").get<double>(),
                      j.at("mpe_hr_pct").at("mean").get<double>(),
                      j.at("mpe_ibi_pct").at("mean").get<double>(),
                      j.at("config_hash").get<std::string>().c_str());
        txt << buf;
    }
    std::ofstream fc(fs::path(results_dir) / "report.csv");
    fc << csv.str();
    std::ofstream ft(fs::path(results_dir) / "report.txt");
    ft << txt.str();
    return txt.str();
}

} // namespace earcardio::pipeline
