#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "common/rng.hpp"
#include "sim/generator.hpp"
#include "train/trainer.hpp"
#include "test_support.hpp"

using namespace gs;
using namespace gs::testing;

namespace {

// Two shape classes whose angle columns separate them perfectly; everything
// else constant. 200 rows.
Dataset separable_dataset() {
    Dataset dataset;
    Rng rng(404);
    const auto& names = default_shape_names();
    for (int i = 0; i < 200; ++i) {
        const int cls = i % 2;
        TelemetryFrame frame;
        frame.timestamp_us = static_cast<std::uint64_t>(i);
        for (std::size_t j = 0; j < kActuatorCount; ++j) {
            frame.angle[j] = (cls == 0 ? 0.3 : 1.1) + 0.01 * rng.uniform(-1.0, 1.0);
            frame.torque[j] = 0.4;
        }
        frame.mass = 0.25;
        frame.object_held = names[static_cast<std::size_t>(cls)];
        frame.size_code = "R3.5";
        dataset.frames.push_back(std::move(frame));
        dataset.labels.push_back(GraspLabel{0, 0});
    }
    return dataset;
}

SlipNetConfig tiny_slip_config() {
    SlipNetConfig config;
    config.decision_dim = 8;
    config.attention_dim = 8;
    config.shared_blocks = 1;
    config.step_blocks = 1;
    return config;
}

ShapeNetConfig tiny_shape_config() {
    ShapeNetConfig config;
    config.widths = {33, 16, 16, 16, 16, 13};
    return config;
}

Dataset small_sim_dataset(std::size_t episodes, std::uint64_t seed) {
    SimConfig sim;
    sim.duration_s = 1.0;
    return generate_dataset(episodes, MixSpec::uniform(), sim, seed);
}

bool params_identical(const SlipNetParams& a, const SlipNetParams& b) {
    bool same = true;
    std::vector<const Matrix*> ta, tb;
    a.for_each_tensor([&](const std::string&, const Matrix& m) { ta.push_back(&m); });
    b.for_each_tensor([&](const std::string&, const Matrix& m) { tb.push_back(&m); });
    for (std::size_t t = 0; t < ta.size(); ++t)
        for (std::size_t i = 0; i < ta[t]->size(); ++i)
            same = same && ta[t]->data()[i] == tb[t]->data()[i];
    return same;
}

}  // namespace

TEST_CASE("lr=0 training leaves parameters bit-identical") {
    const Dataset dataset = small_sim_dataset(4, 5);
    TrainConfig config = TrainConfig::slip_defaults();
    config.lr = 0.0;
    config.epochs = 2;
    config.batch_size = 64;
    config.seed = 9;
    const SlipNetConfig model_config = tiny_slip_config();

    const SlipNetParams before = SlipNetParams::init(model_config, config.seed);
    const SlipTrainResult result =
        train_slipnet(dataset, default_shape_vocab(), model_config, config);
    CHECK(params_identical(before, result.final_model.params));
}

TEST_CASE("separable sanity run reaches full training accuracy") {
    const Dataset dataset = separable_dataset();
    TrainConfig config = TrainConfig::shape_defaults();
    config.epochs = 50;
    config.batch_size = 32;
    config.lr = 0.002;
    config.seed = 7;

    const SplitIndices split = shuffle_split(dataset.size(), 0.2, config.seed);
    const ShapeTrainResult result = train_shapenet_split(
        dataset, default_shape_vocab(), split.train, split.validation, tiny_shape_config(),
        config, config.seed);

    CHECK(result.history.back().train_accuracy == 1.0);
    // Monotone smoke check.
    CHECK(result.history.back().train_loss < result.history.front().train_loss);
}

TEST_CASE("training is bit-reproducible under a fixed seed") {
    const Dataset dataset = small_sim_dataset(6, 21);
    TrainConfig config = TrainConfig::slip_defaults();
    config.epochs = 3;
    config.batch_size = 128;
    config.seed = 33;
    const SlipNetConfig model_config = tiny_slip_config();

    const SlipTrainResult a =
        train_slipnet(dataset, default_shape_vocab(), model_config, config);
    const SlipTrainResult b =
        train_slipnet(dataset, default_shape_vocab(), model_config, config);
    CHECK(params_identical(a.best_model.params, b.best_model.params));
    CHECK(params_identical(a.final_model.params, b.final_model.params));
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].train_loss == b.history[e].train_loss);
        CHECK(a.history[e].val_accuracy == b.history[e].val_accuracy);
    }
}

TEST_CASE("evaluate matches a hand-worked 4-row slip fixture") {
    // Head produces constant logits; slip head says 1, crumple head ties -> 0.
    SlipNetConfig config = tiny_slip_config();
    SlipNetModel model{config, SlipNetParams::init(config, 2), SlipNetState::init(config)};
    model.params.head_w.fill(0.0);
    model.params.head_b = Matrix::row_vector({0.0, 2.0, 0.0, 0.0});

    Rng rng(3);
    const Matrix x = random_matrix(rng, 4, 34, 0.0, 1.0);
    const std::vector<int> slip = {1, 1, 0, 0};
    const std::vector<int> crumple = {0, 1, 0, 1};
    const EvalMetrics metrics = evaluate_slipnet(model, x, slip, crumple);

    // Hand computation: slip prediction 1 for all rows -> accuracy 0.5;
    // crumple prediction 0 -> accuracy 0.5; joint correct only for row 0
    // (slip=1, crumple=0) -> 0.25.
    CHECK(metrics.slip_accuracy == 0.5);
    CHECK(metrics.crumple_accuracy == 0.5);
    CHECK(metrics.accuracy == 0.25);

    // Loss: slip head CE = -log sigmoid-like term; logits [0,2]:
    // target 1 -> ln(1+e^-2), target 0 -> ln(1+e^2).
    const double l1 = std::log(1.0 + std::exp(-2.0));
    const double l0 = std::log(1.0 + std::exp(2.0));
    const double slip_loss = (l1 + l1 + l0 + l0) / 4.0;
    const double crumple_loss = std::log(2.0);  // uniform logits
    CHECK(metrics.loss == doctest::Approx(slip_loss + crumple_loss).epsilon(1e-12));

    // Confusion counts: rows land in truth combos 2,3,0,1 (slip*2+crumple),
    // predictions all combo 2.
    CHECK(metrics.combo_confusion[2][2] == 1);
    CHECK(metrics.combo_confusion[3][2] == 1);
    CHECK(metrics.combo_confusion[0][2] == 1);
    CHECK(metrics.combo_confusion[1][2] == 1);
    std::uint64_t total = 0;
    for (const auto& row : metrics.combo_confusion)
        for (std::uint64_t v : row) total += v;
    CHECK(total == metrics.samples);
}

TEST_CASE("uniform-logit shape model scores ln 13") {
    ShapeNetConfig config = tiny_shape_config();
    ShapeNetModel model{config, ShapeNetParams::init(config, 1)};
    for (auto& w : model.params.weights) w.fill(0.0);
    for (auto& b : model.params.biases) b.fill(0.0);

    Rng rng(5);
    const Matrix x = random_matrix(rng, 10, 33, 0.0, 1.0);
    std::vector<int> targets(10);
    for (auto& t : targets) t = static_cast<int>(rng.uniform_index(13));
    const EvalMetrics metrics = evaluate_shapenet(model, x, targets);
    CHECK(metrics.loss == doctest::Approx(2.5649493574615367).epsilon(1e-12));
}

TEST_CASE("majority-class model accuracy equals the majority fraction") {
    ShapeNetConfig config = tiny_shape_config();
    ShapeNetModel model{config, ShapeNetParams::init(config, 1)};
    for (auto& w : model.params.weights) w.fill(0.0);
    for (auto& b : model.params.biases) b.fill(0.0);
    model.params.biases.back()(0, 4) = 10.0;  // always predicts class 4

    Rng rng(6);
    const Matrix x = random_matrix(rng, 40, 33, 0.0, 1.0);
    std::vector<int> targets;
    for (int i = 0; i < 40; ++i) targets.push_back(i % 4 == 0 ? 4 : (i % 13));
    std::size_t majority = 0;
    for (int t : targets) majority += t == 4;

    const EvalMetrics metrics = evaluate_shapenet(model, x, targets);
    CHECK(std::abs(metrics.accuracy -
                   static_cast<double>(majority) / 40.0) < 1e-9);
}

TEST_CASE("two-fold cross validation on a symmetric dataset") {
    const Dataset dataset = separable_dataset();
    TrainConfig config = TrainConfig::shape_defaults();
    config.epochs = 30;
    config.batch_size = 32;
    config.folds = 2;
    config.seed = 11;

    const CrossValidationResult cv =
        cross_validate_shapenet(dataset, default_shape_vocab(), tiny_shape_config(), config);
    REQUIRE(cv.fold_accuracy.size() == 2);
    CHECK(std::abs(cv.fold_accuracy[0] - cv.fold_accuracy[1]) <= 0.05);
    CHECK(cv.mean_accuracy ==
          doctest::Approx((cv.fold_accuracy[0] + cv.fold_accuracy[1]) / 2.0));

    const CrossValidationResult again =
        cross_validate_shapenet(dataset, default_shape_vocab(), tiny_shape_config(), config);
    for (std::size_t f = 0; f < 2; ++f)
        CHECK(cv.fold_accuracy[f] == again.fold_accuracy[f]);
}

TEST_CASE("checkpoint round trip preserves evaluation metrics") {
    const Dataset dataset = small_sim_dataset(6, 77);
    TrainConfig config = TrainConfig::slip_defaults();
    config.epochs = 2;
    config.batch_size = 128;
    config.seed = 13;
    const SlipNetConfig model_config = tiny_slip_config();
    const ShapeVocab vocab = default_shape_vocab();

    const SlipTrainResult result = train_slipnet(dataset, vocab, model_config, config);

    const Matrix raw = slip_features(dataset.frames, vocab);
    const Matrix scaled = apply_minmax(raw, result.scaler);
    const auto slip = slip_targets(dataset.labels);
    const auto crumple = crumple_targets(dataset.labels);
    const EvalMetrics before = evaluate_slipnet(result.best_model, scaled, slip, crumple);

    const char* path64 = "/tmp/gs_test_train64.ckpt";
    const char* path32 = "/tmp/gs_test_train32.ckpt";
    save_slipnet(path64, result.best_model);
    save_slipnet(path32, result.best_model, {}, CheckpointDtype::kF32);

    const SlipNetModel loaded64 = load_slipnet(path64);
    const EvalMetrics after64 = evaluate_slipnet(loaded64, scaled, slip, crumple);
    CHECK(std::abs(after64.loss - before.loss) < 1e-9);
    CHECK(after64.accuracy == before.accuracy);

    const SlipNetModel loaded32 = load_slipnet(path32);
    const EvalMetrics after32 = evaluate_slipnet(loaded32, scaled, slip, crumple);
    CHECK(std::abs(after32.loss - before.loss) < 1e-5);

    std::remove(path64);
    std::remove(path32);
}

TEST_CASE("exploding training aborts with epoch/batch coordinates") {
    const Dataset dataset = separable_dataset();
    TrainConfig config = TrainConfig::shape_defaults();
    config.epochs = 3;
    config.batch_size = 64;
    config.lr = 1e200;
    config.seed = 3;
    const SplitIndices split = shuffle_split(dataset.size(), 0.2, config.seed);
    CHECK_THROWS_WITH(static_cast<void>(train_shapenet_split(
                          dataset, default_shape_vocab(), split.train, split.validation,
                          tiny_shape_config(), config, config.seed)),
                      doctest::Contains("epoch"));
}

TEST_CASE("attribution concentrates on torque features when only torque matters") {
    // Single object: mass and shape are constant columns (scaled to 0), so
    // only the torque ramp determines the labels.
    SimConfig sim;
    sim.duration_s = 2.0;
    const Dataset dataset = generate_dataset(12, MixSpec::parse("sphere_m:1.0"), sim, 55);

    TrainConfig config = TrainConfig::slip_defaults();
    config.epochs = 12;
    config.batch_size = 256;
    config.seed = 17;
    const SlipTrainResult result =
        train_slipnet(dataset, default_shape_vocab(), tiny_slip_config(), config);
    CHECK(result.best_val.accuracy > 0.9);

    const Matrix raw = slip_features(dataset.frames, default_shape_vocab());
    const Matrix scaled = apply_minmax(raw, result.scaler);
    SlipNetState state = result.best_model.state;
    Matrix batch(256, 34);
    for (std::size_t i = 0; i < 256; ++i)
        for (std::size_t j = 0; j < 34; ++j) batch(i, j) = scaled(i * 7, j);
    const SlipNetOutput out = slipnet_forward(result.best_model.params, state,
                                              result.best_model.config, batch, Mode::kInfer);
    const auto attribution = slipnet_explain(out.traces);
    double torque_mass = 0.0;
    for (std::size_t j = 0; j < 16; ++j) torque_mass += attribution[j];
    CHECK(torque_mass >= 0.7);
}
