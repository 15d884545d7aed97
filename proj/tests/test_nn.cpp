#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vsseq/fsutil.hpp"
#include "vsseq/nn_suite.hpp"
#include "vsseq/ops.hpp"
#include "vsseq/optim.hpp"
#include "vsseq/rng.hpp"
#include "vsseq/serialize.hpp"
#include "vsseq/tensor.hpp"

using namespace vsseq;
using namespace vsseq::nn;

namespace {

TensorPtr param(std::vector<std::size_t> shape, std::vector<double> values) {
    return Tensor::from_values(std::move(shape), std::move(values), true);
}

std::filesystem::path temp_file(const char* stem) {
    return std::filesystem::temp_directory_path() / stem;
}

}  // namespace

TEST_CASE("conv1d same padding oracle") {
    // [1,2,3] against an all-ones width-3 kernel, pad 1: [0+1+2, 1+2+3, 2+3+0].
    auto x = param({1, 3}, {1, 2, 3});
    auto w = param({1, 1, 3}, {1, 1, 1});
    auto b = param({1}, {0});
    auto y = conv1d(x, w, b, 1, 1);
    REQUIRE(y->shape == std::vector<std::size_t>({1, 3}));
    CHECK(y->value[0] == doctest::Approx(3.0));
    CHECK(y->value[1] == doctest::Approx(6.0));
    CHECK(y->value[2] == doctest::Approx(5.0));
}

TEST_CASE("conv1d stride, bias and multi-channel oracle") {
    // Two input channels, one output channel, kernel 2, stride 2, no padding.
    auto x = param({2, 4}, {1, 2, 3, 4, 10, 20, 30, 40});
    auto w = param({1, 2, 2}, {1, -1, 0.5, 0.5});
    auto b = param({1}, {7});
    auto y = conv1d(x, w, b, 2, 0);
    REQUIRE(y->shape == std::vector<std::size_t>({1, 2}));
    // t=0: (1-2) + (5+10) + 7 = 21; t=2: (3-4) + (15+20) + 7 = 41
    CHECK(y->value[0] == doctest::Approx(21.0));
    CHECK(y->value[1] == doctest::Approx(41.0));
}

TEST_CASE("max_pool1d oracle and argmax routing") {
    auto x = param({1, 6}, {1, 3, 2, 5, 4, 0});
    auto y = max_pool1d(x, 2, 2);
    REQUIRE(y->shape == std::vector<std::size_t>({1, 3}));
    CHECK(y->value == std::vector<double>({3, 5, 4}));

    auto loss = mse_loss(flatten(y), Tensor::from_values({3}, {0, 0, 0}));
    backward(loss);
    // Only the winning samples receive gradient.
    CHECK(x->grad[0] == 0.0);
    CHECK(x->grad[1] != 0.0);
    CHECK(x->grad[2] == 0.0);
    CHECK(x->grad[3] != 0.0);
    CHECK(x->grad[5] == 0.0);
}

TEST_CASE("relu, linear and mse oracles") {
    auto x = param({4}, {-2, -0.5, 0.5, 3});
    auto r = relu(x);
    CHECK(r->value == std::vector<double>({0, 0, 0.5, 3}));

    auto w = param({2, 3}, {1, 0, 2, 0, 1, -1});
    auto b = param({2}, {0.5, -0.5});
    auto v = param({3}, {1, 2, 3});
    auto y = linear(w, b, v);
    CHECK(y->value[0] == doctest::Approx(7.5));   // 1 + 6 + 0.5
    CHECK(y->value[1] == doctest::Approx(-1.5));  // 2 - 3 - 0.5

    auto pred = param({2}, {1, 3});
    auto tgt = Tensor::from_values({2}, {0, 1});
    CHECK(mse_loss(pred, tgt)->value[0] == doctest::Approx(2.5));  // (1 + 4) / 2
}

TEST_CASE("shared subexpression accumulates gradient") {
    auto x = param({1}, {3});
    auto a = mul(x, x);
    auto y = add(a, a);  // y = 2 x^2, dy/dx = 4x = 12
    backward(y);
    CHECK(x->grad[0] == doctest::Approx(12.0));
}

TEST_CASE("lstm cell: zero weights keep a zero state") {
    const std::size_t h = 3;
    auto w_ih = Tensor::zeros({4 * h, 2}, true);
    auto w_hh = Tensor::zeros({4 * h, h}, true);
    auto b = Tensor::zeros({4 * h}, true);
    auto x = param({2}, {5, -7});
    LstmState s{Tensor::zeros({h}), Tensor::zeros({h})};
    s = lstm_cell(x, s, w_ih, w_hh, b);
    for (std::size_t i = 0; i < h; ++i) {
        CHECK(s.hidden->value[i] == doctest::Approx(0.0));
        CHECK(s.cell->value[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("lstm cell: saturated forget gate carries the cell state") {
    const std::size_t h = 2;
    auto w_ih = Tensor::zeros({4 * h, 1}, true);
    auto w_hh = Tensor::zeros({4 * h, h}, true);
    auto b = Tensor::zeros({4 * h}, true);
    b->value[2] = 50.0;  // forget block is rows [h, 2h)
    b->value[3] = 50.0;
    auto x = param({1}, {0.0});
    LstmState s{Tensor::zeros({h}), Tensor::from_values({h}, {1.5, -2.5})};
    s = lstm_cell(x, s, w_ih, w_hh, b);
    CHECK(s.cell->value[0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(s.cell->value[1] == doctest::Approx(-2.5).epsilon(1e-9));
}

TEST_CASE("lstm cell matches a hand-computed scalar step") {
    // H = 1, all weights chosen so each gate is easy to evaluate by hand.
    auto w_ih = param({4, 1}, {0.5, -0.25, 1.0, 0.75});
    auto w_hh = param({4, 1}, {0.1, 0.2, 0.3, 0.4});
    auto b = param({4}, {0.05, -0.05, 0.1, 0.0});
    auto x = param({1}, {2.0});
    LstmState s0{Tensor::from_values({1}, {0.5}), Tensor::from_values({1}, {-1.0})};
    LstmState s1 = lstm_cell(x, s0, w_ih, w_hh, b);

    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    const double i = sig(0.5 * 2 + 0.1 * 0.5 + 0.05);
    const double f = sig(-0.25 * 2 + 0.2 * 0.5 - 0.05);
    const double g = std::tanh(1.0 * 2 + 0.3 * 0.5 + 0.1);
    const double o = sig(0.75 * 2 + 0.4 * 0.5);
    const double c = f * -1.0 + i * g;
    CHECK(s1.cell->value[0] == doctest::Approx(c).epsilon(1e-12));
    CHECK(s1.hidden->value[0] == doctest::Approx(o * std::tanh(c)).epsilon(1e-12));
}

TEST_CASE("backpropagation through 60 chained lstm steps") {
    const std::size_t h = 4, feat = 3;
    Rng rng(11);
    auto rand_t = [&](std::vector<std::size_t> shape) {
        auto t = Tensor::zeros(std::move(shape), true);
        for (double& v : t->value) v = rng.uniform(-0.3, 0.3);
        return t;
    };
    auto w_ih = rand_t({4 * h, feat});
    auto w_hh = rand_t({4 * h, h});
    auto b = rand_t({4 * h});
    auto x0 = rand_t({feat});  // only step 0 gets a nonzero input
    auto zero_x = Tensor::zeros({feat});

    LstmState s{Tensor::zeros({h}), Tensor::zeros({h})};
    s = lstm_cell(x0, s, w_ih, w_hh, b);
    for (int t = 1; t < 60; ++t) s = lstm_cell(zero_x, s, w_ih, w_hh, b);
    auto loss = mse_loss(s.hidden, Tensor::from_values({h}, {1, 1, 1, 1}));
    backward(loss);

    double g0 = 0.0;
    for (double g : x0->grad) g0 += std::fabs(g);
    CHECK(g0 > 0.0);  // gradient survives the full unroll, no truncation
}

TEST_CASE("adam single-step oracle and determinism") {
    auto run = [](double g) {
        auto w = param({1}, {1.0});
        w->ensure_grad();
        w->grad[0] = g;
        Adam opt(0.01);
        opt.step({w});
        return w->value[0];
    };
    // Bias-corrected first step: m_hat = g, v_hat = g^2, so the update is
    // lr * g / (|g| + eps) regardless of magnitude.
    CHECK(run(4.0) == doctest::Approx(1.0 - 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-12));
    CHECK(run(-0.002) == doctest::Approx(1.0 + 0.01 * 0.002 / (0.002 + 1e-8)).epsilon(1e-12));
    CHECK(run(4.0) == run(4.0));
}

TEST_CASE("optimizers skip frozen tensors") {
    auto frozen = Tensor::from_values({2}, {3, 4});
    frozen->requires_grad = false;
    auto live = param({2}, {1, 1});
    live->ensure_grad();
    live->grad = {1, 1};

    Adam adam(0.1);
    adam.step({frozen, live});
    CHECK(frozen->value == std::vector<double>({3, 4}));
    CHECK(live->value[0] < 1.0);

    Sgd sgd(0.1);
    live->grad = {1, 1};
    const double before = live->value[0];
    sgd.step({frozen, live});
    CHECK(frozen->value == std::vector<double>({3, 4}));
    CHECK(live->value[0] == doctest::Approx(before - 0.1));
}

TEST_CASE("sgd oracle") {
    auto w = param({2}, {1, -2});
    w->ensure_grad();
    w->grad = {0.5, -0.25};
    Sgd opt(0.2);
    opt.step({w});
    CHECK(w->value[0] == doctest::Approx(0.9));
    CHECK(w->value[1] == doctest::Approx(-1.95));
}

TEST_CASE("weight file round-trips byte-exactly") {
    Rng rng(5);
    std::vector<TensorPtr> tensors;
    auto t1 = Tensor::zeros({3, 4}, true);
    t1->name = "layer.w";
    for (double& v : t1->value) v = rng.normal();
    auto t2 = Tensor::zeros({7}, true);
    t2->name = "layer.b";
    for (double& v : t2->value) v = rng.normal() * 1e-17;  // tiny values survive too
    tensors = {t1, t2};

    const auto p1 = temp_file("vsseq_w1.bin");
    const auto p2 = temp_file("vsseq_w2.bin");
    save_tensors(p1.string(), tensors);
    auto loaded = load_tensors(p1.string());
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0]->name == "layer.w");
    CHECK(loaded[0]->shape == t1->shape);
    CHECK(loaded[0]->value == t1->value);
    CHECK(loaded[1]->value == t2->value);

    save_tensors(p2.string(), loaded);
    CHECK(read_file(p1.string()) == read_file(p2.string()));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("weight loader rejects a corrupted header") {
    const auto p = temp_file("vsseq_bad.bin");
    atomic_write(p.string(), "XXXX garbage");
    CHECK_THROWS(load_tensors(p.string()));
    std::filesystem::remove(p);
}

TEST_CASE("gradient suite passes for every op") {
    for (const auto& [name, report] : nn::run_gradient_suite()) {
        INFO(name, " max_rel_err=", report.max_rel_err, " worst=", report.worst);
        CHECK(report.pass);
        CHECK(report.elements_checked > 0);
    }
}
