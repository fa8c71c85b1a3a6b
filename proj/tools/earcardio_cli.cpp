// Experiment runner: synth | run | train | report.
// Exit codes: 0 success, 2 config error, 3 data error, 4 training failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "earcardio/pipeline/runner.hpp"
#include "earcardio/util/parallel.hpp"

using namespace earcardio;

int main(int argc, char** argv) {
    CLI::App app{"in-ear BCG to SCG signal pipeline"};
    app.require_subcommand(1);

    std::string config_path, corpus_dir, results_dir, stage = "denoiser";
    bool serial = false;
    app.add_flag("--serial", serial, "disable the OpenMP kernels (serial reference path)");

    auto* synth = app.add_subcommand("synth", "generate a paired synthetic corpus");
    synth->add_option("-c,--config", config_path, "experiment config JSON")->required();

    auto* run = app.add_subcommand("run", "corrupt, recover and evaluate a corpus");
    run->add_option("-c,--config", config_path, "experiment config JSON")->required();
    run->add_option("--corpus", corpus_dir, "corpus directory (default <out>/corpus)");

    auto* train = app.add_subcommand("train", "train the denoiser or reconstructor");
    train->add_option("-c,--config", config_path, "experiment config JSON")->required();
    train->add_option("--corpus", corpus_dir, "corpus directory (default <out>/corpus)");
    train->add_option("--stage", stage, "denoiser | reconstructor")->required();

    auto* report = app.add_subcommand("report", "aggregate run results into tables");
    report->add_option("--results", results_dir, "results directory")->required();

    CLI11_PARSE(app, argc, argv);
    par::set_parallel(!serial);

    try {
        if (synth->parsed()) {
            auto cfg = pipeline::ExperimentConfig::from_json_file(config_path);
            auto manifest = pipeline::cmd_synth(cfg);
            std::printf("synth: %zu traces written under %s/corpus (config %s)\n",
                        manifest.entries.size(), cfg.resolved_output_dir().c_str(),
                        cfg.config_hash.c_str());
        } else if (run->parsed()) {
            auto cfg = pipeline::ExperimentConfig::from_json_file(config_path);
            if (corpus_dir.empty()) corpus_dir = cfg.resolved_output_dir() + "/corpus";
            auto s = pipeline::cmd_run(cfg, corpus_dir);
            std::printf("run: %s on %s | windows %zu (kept %zu, discard %.1f%%) | "
                        "sim %.3f soi %.3f | MPE HR %.2f%% IBI %.2f%%\n",
                        s.variant.c_str(), s.scenario.c_str(), s.windows_total, s.windows_kept,
                        100.0 * s.discard_rate, s.similarity_mean, s.soi_mean, s.mpe_hr_median,
                        s.mpe_ibi_median);
            std::printf("results: %s\n", s.results_dir.c_str());
        } else if (train->parsed()) {
            auto cfg = pipeline::ExperimentConfig::from_json_file(config_path);
            if (corpus_dir.empty()) corpus_dir = cfg.resolved_output_dir() + "/corpus";
            auto ckpt = pipeline::cmd_train(cfg, corpus_dir, stage);
            std::printf("train: wrote %s\n", ckpt.c_str());
        } else if (report->parsed()) {
            auto text = pipeline::cmd_report(results_dir);
            std::fputs(text.c_str(), stdout);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return 4;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
