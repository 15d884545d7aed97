#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "vsseq/fsutil.hpp"
#include "vsseq/model.hpp"
#include "vsseq/optim.hpp"
#include "vsseq/rng.hpp"
#include "vsseq/site_class.hpp"

using namespace vsseq;
using namespace vsseq::nn;
namespace fs = std::filesystem;

namespace {

EncoderConfig tiny_encoder(std::size_t in_channels = 3) {
    EncoderConfig enc;
    enc.in_channels = in_channels;
    enc.conv_blocks = {{4, 5, 1, 2}, {6, 3, 1, 2}};
    return enc;
}

SegmentSequence random_sequence(std::size_t t_count, std::size_t channels, std::size_t seg_len,
                                std::uint64_t seed) {
    SegmentSequence seq;
    seq.record_id = "R";
    seq.station_id = "S";
    seq.channel_count = channels;
    seq.segment_len = seg_len;
    Rng rng(seed);
    for (std::size_t t = 0; t < t_count; ++t) {
        std::vector<double> seg(channels * seg_len);
        for (double& v : seg) v = rng.uniform(-1.0, 1.0);
        seq.segments.push_back(std::move(seg));
    }
    return seq;
}

fs::path temp_dir(const char* stem) {
    auto p = fs::temp_directory_path() / stem;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

bool same_bytes(const std::vector<TensorPtr>& a, const std::vector<TensorPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i]->shape != b[i]->shape || a[i]->value != b[i]->value) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("encoder feature dimension matches the layer arithmetic") {
    EncoderConfig def;
    // 100 -> conv(same)/pool2 -> 50 -> 25 -> 12; 64 channels out.
    CHECK(def.feature_dim(100) == 64 * 12);
    CHECK(tiny_encoder().feature_dim(20) == 6 * 5);
}

TEST_CASE("all-zero parameters give a zero prediction") {
    ModelParams params = init_model(tiny_encoder(), 4, 20, 1);
    for (auto& t : params.all_tensors()) std::fill(t->value.begin(), t->value.end(), 0.0);
    auto seq = random_sequence(3, 3, 20, 2);
    auto y = model_forward(params, seq);
    CHECK(y->value[0] == doctest::Approx(0.0));
    CHECK(predict_vs30(params, seq) == doctest::Approx(1.0));  // 10^0 in log mode
}

TEST_CASE("initialization is deterministic per seed and biases the forget gate") {
    ModelParams a = init_model(tiny_encoder(), 4, 20, 7);
    ModelParams b = init_model(tiny_encoder(), 4, 20, 7);
    ModelParams c = init_model(tiny_encoder(), 4, 20, 8);
    CHECK(same_bytes(a.all_tensors(), b.all_tensors()));
    CHECK(!same_bytes(a.all_tensors(), c.all_tensors()));
    // Forget-gate rows [H, 2H) of the LSTM bias sit around +1.
    const std::size_t h = a.hidden;
    for (std::size_t i = h; i < 2 * h; ++i) CHECK(a.b_lstm->value[i] > 0.5);
    for (std::size_t i = 0; i < h; ++i) CHECK(std::fabs(a.b_lstm->value[i]) < 0.5);
}

TEST_CASE("prediction depends on segment order") {
    ModelParams params = init_model(tiny_encoder(), 4, 20, 3);
    auto seq = random_sequence(5, 3, 20, 4);
    const double base = predict_vs30(params, seq);
    std::swap(seq.segments[0], seq.segments[4]);
    CHECK(predict_vs30(params, seq) != doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("prediction depends on sequence length") {
    ModelParams params = init_model(tiny_encoder(), 4, 20, 3);
    auto seq = random_sequence(5, 3, 20, 4);
    const double base = predict_vs30(params, seq);
    seq.segments.pop_back();
    CHECK(predict_vs30(params, seq) != doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("checkpoint round-trip preserves weights bitwise and the window spec") {
    auto dir = temp_dir("vsseq_ckpt");
    const auto path = (dir / "model.bin").string();

    ModelParams params = init_model(tiny_encoder(4), 5, 30, 11);
    WindowSpec spec;
    spec.anchor = Anchor::P_ARRIVAL;
    spec.duration_s = 15.0;
    spec.segment_len_s = 3.0;
    spec.include_ps_channel = true;
    spec.annotation_source = AnnotationSource::AUTO;
    save_checkpoint(params, path, spec);

    WindowSpec back_spec;
    ModelParams back = load_checkpoint(path, &back_spec);
    CHECK(same_bytes(params.all_tensors(), back.all_tensors()));
    CHECK(back.hidden == 5);
    CHECK(back.seg_len == 30);
    CHECK(back.encoder.in_channels == 4);
    CHECK(back_spec.anchor == Anchor::P_ARRIVAL);
    CHECK(back_spec.duration_s == 15.0);
    CHECK(back_spec.segment_len_s == 3.0);
    CHECK(back_spec.include_ps_channel);
    CHECK(back_spec.annotation_source == AnnotationSource::AUTO);

    // Saving the loaded model again reproduces the weight file byte for byte.
    const auto path2 = (dir / "model2.bin").string();
    save_checkpoint(back, path2, back_spec);
    CHECK(read_file(path) == read_file(path2));
    CHECK(read_file(path + ".json") == read_file(path2 + ".json"));
    fs::remove_all(dir);
}

TEST_CASE("encoder transfer replaces weights bitwise and reinitializes the rest") {
    auto dir = temp_dir("vsseq_transfer");
    const auto enc_path = (dir / "enc.bin").string();

    ModelParams donor = init_model(tiny_encoder(), 4, 20, 21);
    save_encoder(donor, enc_path);

    ModelParams target = init_model(tiny_encoder(), 4, 20, 22);
    transfer_load(target, enc_path, /*freeze_encoder=*/false, /*reinit_seed=*/33);
    CHECK(same_bytes(donor.encoder_tensors(), target.encoder_tensors()));
    CHECK(target.w_ih->value != donor.w_ih->value);
    CHECK(target.encoder_tensors()[0]->requires_grad);
    fs::remove_all(dir);
}

TEST_CASE("frozen encoder survives optimizer steps bitwise") {
    auto dir = temp_dir("vsseq_freeze");
    const auto enc_path = (dir / "enc.bin").string();
    ModelParams donor = init_model(tiny_encoder(), 4, 20, 21);
    save_encoder(donor, enc_path);

    ModelParams params = init_model(tiny_encoder(), 4, 20, 22);
    transfer_load(params, enc_path, /*freeze_encoder=*/true, 33);
    for (const auto& t : params.encoder_tensors()) CHECK(!t->requires_grad);

    auto seq = random_sequence(3, 3, 20, 5);
    Adam opt(1e-2);
    for (int step = 0; step < 3; ++step) {
        zero_grad(params.all_tensors());
        auto loss = mse_loss(model_forward(params, seq), Tensor::from_values({1}, {2.0}));
        backward(loss);
        opt.step(params.all_tensors());
    }
    CHECK(same_bytes(donor.encoder_tensors(), params.encoder_tensors()));
    CHECK(params.w_fc->value != donor.w_fc->value);
    fs::remove_all(dir);
}

TEST_CASE("transfer rejects a channel-count mismatch, naming the tensor") {
    auto dir = temp_dir("vsseq_mismatch");
    const auto enc_path = (dir / "enc.bin").string();
    ModelParams donor = init_model(tiny_encoder(3), 4, 20, 21);
    save_encoder(donor, enc_path);

    ModelParams target = init_model(tiny_encoder(4), 4, 20, 22);
    CHECK_THROWS_WITH_AS(transfer_load(target, enc_path, false, 33),
                         doctest::Contains("enc.0.w"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("training loss decreases on a memorizable sample") {
    ModelParams params = init_model(tiny_encoder(), 4, 20, 9);
    auto seq = random_sequence(4, 3, 20, 10);
    auto target = Tensor::from_values({1}, {std::log10(400.0)});
    Adam opt(5e-3);
    double first = 0.0, last = 0.0;
    for (int step = 0; step < 40; ++step) {
        zero_grad(params.all_tensors());
        auto loss = mse_loss(model_forward(params, seq), target);
        backward(loss);
        opt.step(params.all_tensors());
        if (step == 0) first = loss->value[0];
        last = loss->value[0];
    }
    CHECK(last < first * 0.1);
}

TEST_CASE("site classes split at the standard boundaries, upper class inclusive") {
    ClassBoundaries b;
    CHECK(classify(100.0, b) == SiteClass::E);
    CHECK(classify(179.99, b) == SiteClass::E);
    CHECK(classify(180.0, b) == SiteClass::D);
    CHECK(classify(359.99, b) == SiteClass::D);
    CHECK(classify(360.0, b) == SiteClass::C);
    CHECK(classify(759.99, b) == SiteClass::C);
    CHECK(classify(760.0, b) == SiteClass::B);
    CHECK(classify(1499.99, b) == SiteClass::B);
    CHECK(classify(1500.0, b) == SiteClass::A);
    CHECK(classify(3000.0, b) == SiteClass::A);
    CHECK(site_class_label(SiteClass::E) == "E");
    CHECK(site_class_label(SiteClass::A) == "A");

    ClassBoundaries bad;
    bad.thresholds = {180, 360, 360, 1500};
    CHECK_THROWS(bad.validate());
}
