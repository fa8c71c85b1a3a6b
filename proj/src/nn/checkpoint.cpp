#include "earcardio/nn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "earcardio/util/errors.hpp"

namespace earcardio::nn {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kFormatTag = "earcardio-checkpoint";

nlohmann::ordered_json params_to_json(const ParamStore& p) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& e : p.entries()) {
        const std::size_t n = Tensor::numel_of(e.shape);
        nlohmann::ordered_json t;
        t["shape"] = e.shape;
        t["values"] = std::vector<double>(p.ptr(e.offset), p.ptr(e.offset) + n);
        j[e.name] = std::move(t);
    }
    return j;
}

void params_from_json(const nlohmann::json& j, ParamStore& p) {
    for (const auto& e : p.entries()) {
        if (!j.contains(e.name))
            throw DataError("checkpoint: missing parameter tensor '" + e.name + "'");
        const auto& t = j.at(e.name);
        auto shape = t.at("shape").get<std::vector<int>>();
        if (shape != e.shape)
            throw DataError("checkpoint: shape mismatch for '" + e.name + "'");
        auto values = t.at("values").get<std::vector<double>>();
        if (values.size() != Tensor::numel_of(e.shape))
            throw DataError("checkpoint: value count mismatch for '" + e.name + "'");
        std::copy(values.begin(), values.end(), p.ptr(e.offset));
    }
}

nlohmann::ordered_json header(const std::string& model, uint64_t train_seed) {
    nlohmann::ordered_json j;
    j["format"] = kFormatTag;
    j["version"] = kCheckpointVersion;
    j["model"] = model;
    j["train_seed"] = train_seed;
    return j;
}

nlohmann::json load_and_check(const std::string& path, const std::string& model) {
    std::ifstream f(path);
    if (!f) throw DataError("checkpoint: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    if (j.value("format", "") != kFormatTag || j.value("version", 0) != kCheckpointVersion)
        throw DataError("checkpoint: unrecognized header in " + path);
    if (j.value("model", "") != model)
        throw DataError("checkpoint: expected a " + model + " checkpoint in " + path);
    return j;
}

} // namespace

void save_denoiser(const std::string& path, const DenoiserModel& model, uint64_t train_seed) {
    auto j = header("denoiser", train_seed);
    const auto& c = model.config();
    j["arch"] = {{"attn_dim", c.attn_dim}, {"attn_heads", c.attn_heads}, {"enc1_ch", c.enc1_ch},
                 {"enc2_ch", c.enc2_ch},   {"kernel", c.kernel},         {"seed", c.seed}};
    j["params"] = params_to_json(model.params());
    std::ofstream f(path);
    if (!f) throw DataError("checkpoint: cannot write " + path);
    f << j.dump() << "\n";
}

DenoiserModel load_denoiser(const std::string& path) {
    auto j = load_and_check(path, "denoiser");
    DenoiserConfig c;
    const auto& a = j.at("arch");
    c.attn_dim = a.at("attn_dim").get<int>();
    c.attn_heads = a.at("attn_heads").get<int>();
    c.enc1_ch = a.at("enc1_ch").get<int>();
    c.enc2_ch = a.at("enc2_ch").get<int>();
    c.kernel = a.at("kernel").get<int>();
    c.seed = a.at("seed").get<uint64_t>();
    DenoiserModel model(c);
    params_from_json(j.at("params"), model.params());
    return model;
}

void save_reconstructor(const std::string& path, const ReconstructorModel& model,
                        uint64_t train_seed) {
    auto j = header("reconstructor", train_seed);
    const auto& c = model.config();
    j["arch"] = {{"feat_ch", c.feat_ch}, {"n_blocks", c.n_blocks}, {"heads", c.heads},
                 {"ffn_dim", c.ffn_dim}, {"up_ch", c.up_ch},       {"kernel", c.kernel},
                 {"seed", c.seed}};
    const auto& h = model.head_spec();
    j["head"] = {{"task", h.task}, {"kind", h.kind}, {"out_dim", h.out_dim}};
    j["params"] = params_to_json(model.params());
    std::ofstream f(path);
    if (!f) throw DataError("checkpoint: cannot write " + path);
    f << j.dump() << "\n";
}

ReconstructorModel load_reconstructor(const std::string& path) {
    auto j = load_and_check(path, "reconstructor");
    ReconstructorConfig c;
    const auto& a = j.at("arch");
    c.feat_ch = a.at("feat_ch").get<int>();
    c.n_blocks = a.at("n_blocks").get<int>();
    c.heads = a.at("heads").get<int>();
    c.ffn_dim = a.at("ffn_dim").get<int>();
    c.up_ch = a.at("up_ch").get<int>();
    c.kernel = a.at("kernel").get<int>();
    c.seed = a.at("seed").get<uint64_t>();
    TaskHeadSpec h;
    const auto& hj = j.at("head");
    h.task = hj.at("task").get<std::string>();
    h.kind = hj.at("kind").get<std::string>();
    h.out_dim = hj.at("out_dim").get<int>();
    ReconstructorModel model(c, h);
    params_from_json(j.at("params"), model.params());
    return model;
}

} // namespace earcardio::nn
