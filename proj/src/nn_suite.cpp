#include "vsseq/nn_suite.hpp"

#include <cmath>

#include "vsseq/model.hpp"
#include "vsseq/ops.hpp"
#include "vsseq/rng.hpp"

namespace vsseq::nn {

namespace {

TensorPtr random_tensor(std::vector<std::size_t> shape, Rng& rng, bool requires_grad = true,
                        double away_from_zero = 0.0) {
    auto t = Tensor::zeros(std::move(shape), requires_grad);
    for (double& v : t->value) {
        v = rng.uniform(-1.0, 1.0);
        if (away_from_zero > 0.0 && std::fabs(v) < away_from_zero) {
            v = v < 0.0 ? v - away_from_zero : v + away_from_zero;
        }
    }
    return t;
}

}  // namespace

std::vector<std::pair<std::string, GradCheckReport>> run_gradient_suite(double step, double tol,
                                                                        std::uint64_t seed) {
    std::vector<std::pair<std::string, GradCheckReport>> out;
    Rng rng(seed);

    {
        auto x = random_tensor({3, 17}, rng);
        auto w = random_tensor({4, 3, 5}, rng);
        auto b = random_tensor({4}, rng);
        auto target = random_tensor({4 * 9}, rng, false);
        auto f = [&] { return mse_loss(flatten(conv1d(x, w, b, 2, 2)), target); };
        out.emplace_back("conv1d", grad_check(f, {x, w, b}, step, tol, seed));
    }
    {
        // Values kept away from the pool/relu kinks so finite differences
        // stay on one linear piece.
        auto x = random_tensor({2, 12}, rng, true, 0.05);
        auto target = random_tensor({2 * 5}, rng, false);
        auto f = [&] { return mse_loss(flatten(max_pool1d(x, 3, 2)), target); };
        out.emplace_back("max_pool1d", grad_check(f, {x}, step, tol, seed));
    }
    {
        auto x = random_tensor({10}, rng, true, 0.05);
        auto target = random_tensor({10}, rng, false);
        auto f = [&] { return mse_loss(relu(x), target); };
        out.emplace_back("relu", grad_check(f, {x}, step, tol, seed));
    }
    {
        auto w = random_tensor({5, 8}, rng);
        auto b = random_tensor({5}, rng);
        auto x = random_tensor({8}, rng);
        auto target = random_tensor({5}, rng, false);
        auto f = [&] { return mse_loss(linear(w, b, x), target); };
        out.emplace_back("linear", grad_check(f, {w, b, x}, step, tol, seed));
    }
    {
        auto pred = random_tensor({7}, rng);
        auto target = random_tensor({7}, rng, false);
        auto f = [&] { return mse_loss(pred, target); };
        out.emplace_back("mse_loss", grad_check(f, {pred}, step, tol, seed));
    }
    {
        const std::size_t h = 6, feat = 5;
        auto x = random_tensor({feat}, rng);
        auto h0 = random_tensor({h}, rng);
        auto c0 = random_tensor({h}, rng);
        auto w_ih = random_tensor({4 * h, feat}, rng);
        auto w_hh = random_tensor({4 * h, h}, rng);
        auto b = random_tensor({4 * h}, rng);
        auto target = random_tensor({h}, rng, false);
        auto f = [&] {
            auto s = lstm_cell(x, {h0, c0}, w_ih, w_hh, b);
            return mse_loss(s.hidden, target);
        };
        out.emplace_back("lstm_cell",
                         grad_check(f, {x, h0, c0, w_ih, w_hh, b}, step, tol, seed));
    }
    {
        // Three chained cells: gradient must flow through both carried states.
        const std::size_t h = 4, feat = 3;
        auto w_ih = random_tensor({4 * h, feat}, rng);
        auto w_hh = random_tensor({4 * h, h}, rng);
        auto b = random_tensor({4 * h}, rng);
        auto x0 = random_tensor({feat}, rng);
        auto x1 = random_tensor({feat}, rng);
        auto x2 = random_tensor({feat}, rng);
        auto target = random_tensor({h}, rng, false);
        auto f = [&] {
            LstmState s{Tensor::zeros({h}), Tensor::zeros({h})};
            s = lstm_cell(x0, s, w_ih, w_hh, b);
            s = lstm_cell(x1, s, w_ih, w_hh, b);
            s = lstm_cell(x2, s, w_ih, w_hh, b);
            return mse_loss(s.hidden, target);
        };
        out.emplace_back("lstm_chain",
                         grad_check(f, {w_ih, w_hh, b, x0, x1, x2}, step, tol, seed));
    }
    {
        // End-to-end model on a 2-segment toy configuration.
        EncoderConfig enc;
        enc.in_channels = 3;
        enc.conv_blocks = {{4, 5, 1, 2}, {6, 3, 1, 2}};
        const std::size_t seg_len = 20;
        ModelParams params = init_model(enc, 5, seg_len, seed);

        SegmentSequence seq;
        seq.record_id = "toy";
        seq.channel_count = 3;
        seq.segment_len = seg_len;
        Rng data_rng(seed + 1);
        for (int t = 0; t < 2; ++t) {
            std::vector<double> seg(3 * seg_len);
            for (double& v : seg) v = data_rng.uniform(-1.0, 1.0);
            seq.segments.push_back(std::move(seg));
        }
        auto target = Tensor::from_values({1}, {2.5});
        auto f = [&] { return mse_loss(model_forward(params, seq), target); };
        out.emplace_back("model_end_to_end",
                         grad_check(f, params.all_tensors(), step, tol, seed));
    }
    return out;
}

}  // namespace vsseq::nn
