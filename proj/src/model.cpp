#include "vsseq/model.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "vsseq/fsutil.hpp"
#include "vsseq/json_conv.hpp"
#include "vsseq/rng.hpp"
#include "vsseq/serialize.hpp"

namespace vsseq {

using nn::Tensor;
using nn::TensorPtr;

namespace {

TensorPtr init_uniform(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng,
                       std::string name) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    auto t = Tensor::zeros(std::move(shape), true);
    for (double& v : t->value) v = rng.uniform(-bound, bound);
    t->name = std::move(name);
    return t;
}

void init_lstm_and_head(ModelParams& p, std::size_t feature_dim, Rng& rng) {
    const std::size_t h = p.hidden;
    p.w_ih = init_uniform({4 * h, feature_dim}, feature_dim, rng, "lstm.w_ih");
    p.w_hh = init_uniform({4 * h, h}, h, rng, "lstm.w_hh");
    p.b_lstm = Tensor::zeros({4 * h}, true);
    p.b_lstm->name = "lstm.b";
    // Forget-gate bias +1 keeps gradient flowing through long unrolls.
    for (std::size_t i = h; i < 2 * h; ++i) p.b_lstm->value[i] = 1.0;
    p.w_fc = init_uniform({1, h}, h, rng, "head.w");
    p.b_fc = Tensor::zeros({1}, true);
    p.b_fc->name = "head.b";
}

}  // namespace

std::size_t EncoderConfig::feature_dim(std::size_t seg_len) const {
    std::size_t len = seg_len;
    std::size_t ch = in_channels;
    for (const auto& b : conv_blocks) {
        const std::size_t pad = b.kernel / 2;
        if (len + 2 * pad < b.kernel) throw std::invalid_argument("EncoderConfig: segment too short");
        len = (len + 2 * pad - b.kernel) / b.stride + 1;
        if (len < b.pool_width) throw std::invalid_argument("EncoderConfig: segment too short to pool");
        len = (len - b.pool_width) / b.pool_width + 1;
        ch = b.out_channels;
    }
    return ch * len;
}

std::vector<TensorPtr> ModelParams::all_tensors() const {
    std::vector<TensorPtr> out = encoder_tensors();
    out.insert(out.end(), {w_ih, w_hh, b_lstm, w_fc, b_fc});
    return out;
}

std::vector<TensorPtr> ModelParams::encoder_tensors() const {
    std::vector<TensorPtr> out;
    for (std::size_t i = 0; i < conv_w.size(); ++i) {
        out.push_back(conv_w[i]);
        out.push_back(conv_b[i]);
    }
    return out;
}

ModelParams ModelParams::clone() const {
    ModelParams out = *this;
    out.conv_w.clear();
    out.conv_b.clear();
    auto copy = [](const TensorPtr& t) {
        auto c = Tensor::from_values(t->shape, t->value, t->requires_grad);
        c->name = t->name;
        return c;
    };
    for (std::size_t i = 0; i < conv_w.size(); ++i) {
        out.conv_w.push_back(copy(conv_w[i]));
        out.conv_b.push_back(copy(conv_b[i]));
    }
    out.w_ih = copy(w_ih);
    out.w_hh = copy(w_hh);
    out.b_lstm = copy(b_lstm);
    out.w_fc = copy(w_fc);
    out.b_fc = copy(b_fc);
    return out;
}

ModelParams init_model(const EncoderConfig& cfg, std::size_t hidden, std::size_t seg_len,
                       std::uint64_t seed, TargetMode target) {
    ModelParams p;
    p.encoder = cfg;
    p.hidden = hidden;
    p.seg_len = seg_len;
    p.target = target;

    Rng rng(seed);
    std::size_t in_ch = cfg.in_channels;
    for (std::size_t i = 0; i < cfg.conv_blocks.size(); ++i) {
        const auto& b = cfg.conv_blocks[i];
        const std::string base = "enc." + std::to_string(i);
        p.conv_w.push_back(init_uniform({b.out_channels, in_ch, b.kernel}, in_ch * b.kernel, rng,
                                        base + ".w"));
        auto bias = Tensor::zeros({b.out_channels}, true);
        bias->name = base + ".b";
        p.conv_b.push_back(std::move(bias));
        in_ch = b.out_channels;
    }
    init_lstm_and_head(p, cfg.feature_dim(seg_len), rng);
    return p;
}

nn::TensorPtr model_forward(const ModelParams& params, const SegmentSequence& seq) {
    if (seq.channel_count != params.encoder.in_channels) {
        throw std::invalid_argument("model_forward: sequence channel count does not match encoder");
    }
    if (seq.segment_len != params.seg_len) {
        throw std::invalid_argument("model_forward: segment length does not match encoder");
    }

    nn::LstmState state{Tensor::zeros({params.hidden}), Tensor::zeros({params.hidden})};
    for (const auto& seg : seq.segments) {
        TensorPtr x = Tensor::from_values({seq.channel_count, seq.segment_len}, seg);
        for (std::size_t i = 0; i < params.encoder.conv_blocks.size(); ++i) {
            const auto& b = params.encoder.conv_blocks[i];
            x = nn::conv1d(x, params.conv_w[i], params.conv_b[i], b.stride, b.kernel / 2);
            x = nn::relu(x);
            x = nn::max_pool1d(x, b.pool_width, b.pool_width);
        }
        state = nn::lstm_cell(nn::flatten(x), state, params.w_ih, params.w_hh, params.b_lstm);
    }
    return nn::linear(params.w_fc, params.b_fc, state.hidden);
}

double predict_vs30(const ModelParams& params, const SegmentSequence& seq) {
    const double y = model_forward(params, seq)->value[0];
    return params.target == TargetMode::LOG10 ? std::pow(10.0, y) : y;
}

void save_checkpoint(const ModelParams& params, const std::string& path, const WindowSpec& spec) {
    nn::save_tensors(path, params.all_tensors());
    nlohmann::json j;
    j["encoder"] = params.encoder;
    j["hidden"] = params.hidden;
    j["seg_len"] = params.seg_len;
    j["target"] = params.target;
    j["window"] = spec;
    atomic_write(path + ".json", j.dump(2) + "\n");
}

ModelParams load_checkpoint(const std::string& path, WindowSpec* spec_out) {
    const auto j = nlohmann::json::parse(read_file(path + ".json"));
    ModelParams p;
    p.encoder = j.at("encoder").get<EncoderConfig>();
    p.hidden = j.at("hidden").get<std::size_t>();
    p.seg_len = j.at("seg_len").get<std::size_t>();
    p.target = j.at("target").get<TargetMode>();
    if (spec_out) *spec_out = j.at("window").get<WindowSpec>();

    std::map<std::string, TensorPtr> by_name;
    for (auto& t : nn::load_tensors(path)) by_name[t->name] = t;

    auto take = [&](const std::string& name) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw std::runtime_error("checkpoint missing tensor " + name);
        it->second->requires_grad = true;
        return it->second;
    };
    for (std::size_t i = 0; i < p.encoder.conv_blocks.size(); ++i) {
        const std::string base = "enc." + std::to_string(i);
        p.conv_w.push_back(take(base + ".w"));
        p.conv_b.push_back(take(base + ".b"));
    }
    p.w_ih = take("lstm.w_ih");
    p.w_hh = take("lstm.w_hh");
    p.b_lstm = take("lstm.b");
    p.w_fc = take("head.w");
    p.b_fc = take("head.b");
    return p;
}

void save_encoder(const ModelParams& params, const std::string& path) {
    nn::save_tensors(path, params.encoder_tensors());
}

void transfer_load(ModelParams& params, const std::string& encoder_path, bool freeze_encoder,
                   std::uint64_t reinit_seed) {
    std::map<std::string, TensorPtr> by_name;
    for (auto& t : nn::load_tensors(encoder_path)) by_name[t->name] = t;

    for (auto& own : params.encoder_tensors()) {
        auto it = by_name.find(own->name);
        if (it == by_name.end()) {
            throw std::runtime_error("transfer_load: encoder file lacks tensor " + own->name);
        }
        if (it->second->shape != own->shape) {
            throw std::runtime_error("transfer_load: shape mismatch for tensor " + own->name);
        }
        own->value = it->second->value;
        if (freeze_encoder) own->requires_grad = false;
    }
    Rng rng(reinit_seed);
    init_lstm_and_head(params, params.encoder.feature_dim(params.seg_len), rng);
}

}  // namespace vsseq
