#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vsseq/ops.hpp"
#include "vsseq/preprocess.hpp"

namespace vsseq {

struct ConvBlock {
    std::size_t out_channels;
    std::size_t kernel;
    std::size_t stride;
    std::size_t pool_width;
};

struct EncoderConfig {
    std::size_t in_channels = 3;
    std::vector<ConvBlock> conv_blocks{{16, 7, 1, 2}, {32, 5, 1, 2}, {64, 3, 1, 2}};

    // Flattened encoder output length for segments of seg_len samples.
    // "Same" padding (kernel/2) before each stride, pooling non-overlapping.
    std::size_t feature_dim(std::size_t seg_len) const;
};

enum class TargetMode { LOG10, LINEAR };

// Shared CNN encoder + single LSTM block + scalar regression head.
struct ModelParams {
    EncoderConfig encoder;
    std::size_t hidden = 64;
    std::size_t seg_len = 100;  // samples per segment the encoder was built for
    TargetMode target = TargetMode::LOG10;

    std::vector<nn::TensorPtr> conv_w;  // per block
    std::vector<nn::TensorPtr> conv_b;
    nn::TensorPtr w_ih, w_hh, b_lstm;
    nn::TensorPtr w_fc, b_fc;

    std::vector<nn::TensorPtr> all_tensors() const;
    std::vector<nn::TensorPtr> encoder_tensors() const;
    ModelParams clone() const;  // deep copy of values (grads not copied)
};

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) init; LSTM forget-gate bias +1.
ModelParams init_model(const EncoderConfig& cfg, std::size_t hidden, std::size_t seg_len,
                       std::uint64_t seed, TargetMode target = TargetMode::LOG10);

// Per-segment encoder features fed through the shared LSTM; the head reads
// the final hidden state. Output is log10(Vs30) in LOG10 mode.
nn::TensorPtr model_forward(const ModelParams& params, const SegmentSequence& seq);

double predict_vs30(const ModelParams& params, const SegmentSequence& seq);

// Checkpoint = weight file + JSON sidecar (<path>.json) carrying the encoder
// config, hidden size, target mode and the training WindowSpec so inference
// can reject mismatched preprocessing.
void save_checkpoint(const ModelParams& params, const std::string& path, const WindowSpec& spec);
ModelParams load_checkpoint(const std::string& path, WindowSpec* spec_out = nullptr);

void save_encoder(const ModelParams& params, const std::string& path);

// Replaces encoder weights bitwise from the file, re-initializes LSTM and
// head, optionally freezes the encoder (requires_grad = false, so optimizers
// leave it untouched). Throws on the first name/shape mismatch.
void transfer_load(ModelParams& params, const std::string& encoder_path, bool freeze_encoder,
                   std::uint64_t reinit_seed);

}  // namespace vsseq
