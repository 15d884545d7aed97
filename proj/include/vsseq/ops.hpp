#pragma once

#include "vsseq/tensor.hpp"

namespace vsseq::nn {

// Elementwise
TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
TensorPtr sigmoid(const TensorPtr& x);
TensorPtr tanh_t(const TensorPtr& x);
TensorPtr relu(const TensorPtr& x);

// y = W x, W: [rows x cols], x: [cols]
TensorPtr matvec(const TensorPtr& w, const TensorPtr& x);

// Contiguous view copy: y = x[start .. start+len)
TensorPtr slice(const TensorPtr& x, std::size_t start, std::size_t len);

TensorPtr flatten(const TensorPtr& x);

// Cross-correlation conv. input [C_in x L], weight [C_out x C_in x K], bias [C_out].
TensorPtr conv1d(const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias,
                 std::size_t stride, std::size_t padding);

// input [C x L] -> [C x L_out], L_out = (L - width)/stride + 1
TensorPtr max_pool1d(const TensorPtr& input, std::size_t width, std::size_t stride);

// y = W x + b
TensorPtr linear(const TensorPtr& w, const TensorPtr& b, const TensorPtr& x);

// Mean over elements of (pred - target)^2
TensorPtr mse_loss(const TensorPtr& pred, const TensorPtr& target);

struct LstmState {
    TensorPtr hidden;
    TensorPtr cell;
};

// Standard LSTM cell. Gate rows of W_ih/W_hh/b are packed [i; f; g; o],
// each block of size H. Differentiable through x, both states and all weights.
LstmState lstm_cell(const TensorPtr& x, const LstmState& state, const TensorPtr& w_ih,
                    const TensorPtr& w_hh, const TensorPtr& b);

}  // namespace vsseq::nn
