#include "train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <atomic>
#include <thread>

#include "common/rng.hpp"
#include "numerics/layers.hpp"

namespace gs {

TrainConfig TrainConfig::slip_defaults() {
    TrainConfig config;
    config.task = Task::kSlip;
    config.lr = 0.02;
    config.epochs = 100;
    config.batch_size = 2048;
    config.val_fraction = 0.16;
    return config;
}

TrainConfig TrainConfig::shape_defaults() {
    TrainConfig config;
    config.task = Task::kShape;
    config.lr = 0.002;
    config.epochs = 200;
    config.batch_size = 2048;
    config.folds = 10;
    return config;
}

void TrainConfig::validate() const {
    if (lr < 0.0) throw std::invalid_argument("TrainConfig: lr must be >= 0");
    if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: val_fraction must be in (0,1)");
    if (folds < 2) throw std::invalid_argument("TrainConfig: folds must be >= 2");
}

namespace {

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed ^ 0xe90c45ull, epoch));
    rng.shuffle(order);
    return order;
}

Matrix gather_batch(const Matrix& x, const std::vector<std::size_t>& order,
                    std::size_t begin, std::size_t end) {
    Matrix batch(end - begin, x.cols());
    for (std::size_t i = begin; i < end; ++i) {
        const double* src = x.row(order[i]);
        double* dst = batch.row(i - begin);
        for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
    }
    return batch;
}

template <typename T>
std::vector<T> gather_targets(const std::vector<T>& t, const std::vector<std::size_t>& order,
                              std::size_t begin, std::size_t end) {
    std::vector<T> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(t[order[i]]);
    return out;
}

void check_loss_finite(double loss, std::size_t epoch, std::size_t batch) {
    if (!std::isfinite(loss))
        throw std::runtime_error("training aborted: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " + std::to_string(batch));
}

}  // namespace

EvalMetrics evaluate_slipnet(const SlipNetModel& model, const Matrix& scaled_features,
                             const std::vector<int>& slip, const std::vector<int>& crumple,
                             std::size_t batch_size) {
    EvalMetrics metrics;
    metrics.samples = scaled_features.rows();
    if (metrics.samples == 0) return metrics;

    SlipNetState state = model.state;  // infer mode leaves stats untouched
    double loss_sum = 0.0;
    std::uint64_t slip_hits = 0, crumple_hits = 0, joint_hits = 0;

    std::vector<std::size_t> identity(metrics.samples);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    for (std::size_t begin = 0; begin < metrics.samples; begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, metrics.samples);
        const Matrix batch = gather_batch(scaled_features, identity, begin, end);
        const auto slip_t = gather_targets(slip, identity, begin, end);
        const auto crumple_t = gather_targets(crumple, identity, begin, end);

        const SlipNetOutput out =
            slipnet_forward(model.params, state, model.config, batch, Mode::kInfer);
        const auto slip_ce = cross_entropy(out.slip_logits, slip_t);
        const auto crumple_ce = cross_entropy(out.crumple_logits, crumple_t);
        loss_sum += (slip_ce.loss + crumple_ce.loss) * static_cast<double>(end - begin);

        for (std::size_t i = 0; i < batch.rows(); ++i) {
            const int slip_pred = out.slip_logits(i, 1) > out.slip_logits(i, 0) ? 1 : 0;
            const int crumple_pred =
                out.crumple_logits(i, 1) > out.crumple_logits(i, 0) ? 1 : 0;
            const bool slip_ok = slip_pred == slip_t[i];
            const bool crumple_ok = crumple_pred == crumple_t[i];
            slip_hits += slip_ok;
            crumple_hits += crumple_ok;
            joint_hits += slip_ok && crumple_ok;
            const std::size_t truth = static_cast<std::size_t>(slip_t[i] * 2 + crumple_t[i]);
            const std::size_t pred = static_cast<std::size_t>(slip_pred * 2 + crumple_pred);
            metrics.combo_confusion[truth][pred]++;
        }
    }
    const double n = static_cast<double>(metrics.samples);
    metrics.loss = loss_sum / n;
    metrics.slip_accuracy = static_cast<double>(slip_hits) / n;
    metrics.crumple_accuracy = static_cast<double>(crumple_hits) / n;
    metrics.accuracy = static_cast<double>(joint_hits) / n;
    return metrics;
}

EvalMetrics evaluate_shapenet(const ShapeNetModel& model, const Matrix& scaled_features,
                              const std::vector<int>& shape, std::size_t batch_size) {
    EvalMetrics metrics;
    metrics.samples = scaled_features.rows();
    if (metrics.samples == 0) return metrics;

    double loss_sum = 0.0;
    std::uint64_t hits = 0;
    std::vector<std::size_t> identity(metrics.samples);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    for (std::size_t begin = 0; begin < metrics.samples; begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, metrics.samples);
        const Matrix batch = gather_batch(scaled_features, identity, begin, end);
        const auto targets = gather_targets(shape, identity, begin, end);
        const Matrix logits = shapenet_forward(model.params, batch);
        loss_sum += cross_entropy(logits, targets).loss * static_cast<double>(end - begin);
        for (std::size_t i = 0; i < batch.rows(); ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < logits.cols(); ++j)
                if (logits(i, j) > logits(i, best)) best = j;
            hits += static_cast<int>(best) == targets[i];
        }
    }
    metrics.loss = loss_sum / static_cast<double>(metrics.samples);
    metrics.accuracy = static_cast<double>(hits) / static_cast<double>(metrics.samples);
    return metrics;
}

SlipTrainResult train_slipnet(const Dataset& dataset, const ShapeVocab& vocab,
                              const SlipNetConfig& model_config, const TrainConfig& config) {
    config.validate();
    model_config.validate();
    if (dataset.size() == 0) throw std::invalid_argument("train_slipnet: empty dataset");

    const Matrix raw = slip_features(dataset.frames, vocab);
    const std::vector<int> slip = slip_targets(dataset.labels);
    const std::vector<int> crumple = crumple_targets(dataset.labels);

    const SplitIndices split = shuffle_split(dataset.size(), config.val_fraction, config.seed);
    if (split.train.empty() || split.validation.empty())
        throw std::invalid_argument("train_slipnet: split leaves an empty set");

    SlipTrainResult result;
    result.scaler = fit_minmax(gather_rows(raw, split.train));
    const Matrix x_train = apply_minmax(gather_rows(raw, split.train), result.scaler);
    const Matrix x_val = apply_minmax(gather_rows(raw, split.validation), result.scaler);
    const auto slip_train = gather(slip, split.train);
    const auto slip_val = gather(slip, split.validation);
    const auto crumple_train = gather(crumple, split.train);
    const auto crumple_val = gather(crumple, split.validation);

    SlipNetModel model{model_config, SlipNetParams::init(model_config, config.seed),
                       SlipNetState::init(model_config)};

    std::vector<Matrix*> param_list;
    model.params.for_each_tensor(
        [&](const std::string&, Matrix& m) { param_list.push_back(&m); });
    AdamState adam(config.adam);

    double best_accuracy = -1.0;
    const std::size_t n_train = split.train.size();

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto order = epoch_order(n_train, config.seed, epoch);
        double loss_sum = 0.0;
        std::uint64_t slip_hits = 0, crumple_hits = 0, joint_hits = 0;

        for (std::size_t begin = 0, batch_no = 0; begin < n_train;
             begin += config.batch_size, ++batch_no) {
            const std::size_t end = std::min(begin + config.batch_size, n_train);
            const Matrix batch = gather_batch(x_train, order, begin, end);
            const auto slip_t = gather_targets(slip_train, order, begin, end);
            const auto crumple_t = gather_targets(crumple_train, order, begin, end);

            SlipNetForwardCache cache;
            const SlipNetOutput out = slipnet_forward(model.params, model.state,
                                                      model.config, batch, Mode::kTrain,
                                                      &cache);
            const auto slip_ce = cross_entropy(out.slip_logits, slip_t);
            const auto crumple_ce = cross_entropy(out.crumple_logits, crumple_t);
            const double loss = slip_ce.loss + crumple_ce.loss;
            check_loss_finite(loss, epoch, batch_no);
            loss_sum += loss * static_cast<double>(end - begin);

            for (std::size_t i = 0; i < batch.rows(); ++i) {
                const int sp = out.slip_logits(i, 1) > out.slip_logits(i, 0) ? 1 : 0;
                const int cp = out.crumple_logits(i, 1) > out.crumple_logits(i, 0) ? 1 : 0;
                const bool sok = sp == slip_t[i], cok = cp == crumple_t[i];
                slip_hits += sok;
                crumple_hits += cok;
                joint_hits += sok && cok;
            }

            SlipNetParams grads = slipnet_backward(slip_ce.d_logits, crumple_ce.d_logits,
                                                   cache, model.params, model.config);
            std::vector<const Matrix*> grad_list;
            grads.for_each_tensor(
                [&](const std::string&, const Matrix& m) { grad_list.push_back(&m); });
            adam.step(param_list, grad_list, config.lr);
        }

        const EvalMetrics val =
            evaluate_slipnet(model, x_val, slip_val, crumple_val, config.batch_size);

        EpochMetrics em;
        em.epoch = epoch + 1;
        em.train_loss = loss_sum / static_cast<double>(n_train);
        em.train_slip_accuracy = static_cast<double>(slip_hits) / static_cast<double>(n_train);
        em.train_crumple_accuracy =
            static_cast<double>(crumple_hits) / static_cast<double>(n_train);
        em.train_accuracy = static_cast<double>(joint_hits) / static_cast<double>(n_train);
        em.val_loss = val.loss;
        em.val_slip_accuracy = val.slip_accuracy;
        em.val_crumple_accuracy = val.crumple_accuracy;
        em.val_accuracy = val.accuracy;
        result.history.push_back(em);

        if (val.accuracy > best_accuracy) {
            best_accuracy = val.accuracy;
            result.best_model = model;
            result.best_epoch = epoch + 1;
            result.best_val = val;
        }
    }
    result.final_model = std::move(model);
    return result;
}

ShapeTrainResult train_shapenet_split(const Dataset& dataset, const ShapeVocab& vocab,
                                      const std::vector<std::size_t>& train_idx,
                                      const std::vector<std::size_t>& val_idx,
                                      const ShapeNetConfig& model_config,
                                      const TrainConfig& config, std::uint64_t fold_seed) {
    config.validate();
    model_config.validate();
    if (train_idx.empty() || val_idx.empty())
        throw std::invalid_argument("train_shapenet_split: empty split");

    const Matrix raw = shape_features(dataset.frames);
    const std::vector<int> shape = encode_shapes(dataset.frames, vocab);

    ShapeTrainResult result;
    result.scaler = fit_minmax(gather_rows(raw, train_idx));
    const Matrix x_train = apply_minmax(gather_rows(raw, train_idx), result.scaler);
    const Matrix x_val = apply_minmax(gather_rows(raw, val_idx), result.scaler);
    const auto y_train = gather(shape, train_idx);
    const auto y_val = gather(shape, val_idx);

    ShapeNetModel model{model_config, ShapeNetParams::init(model_config, fold_seed)};
    std::vector<Matrix*> param_list;
    model.params.for_each_tensor(
        [&](const std::string&, Matrix& m) { param_list.push_back(&m); });
    AdamState adam(config.adam);

    double best_accuracy = -1.0;
    const std::size_t n_train = train_idx.size();

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto order = epoch_order(n_train, fold_seed, epoch);
        double loss_sum = 0.0;
        std::uint64_t hits = 0;

        for (std::size_t begin = 0, batch_no = 0; begin < n_train;
             begin += config.batch_size, ++batch_no) {
            const std::size_t end = std::min(begin + config.batch_size, n_train);
            const Matrix batch = gather_batch(x_train, order, begin, end);
            const auto targets = gather_targets(y_train, order, begin, end);

            ShapeNetForwardCache cache;
            const Matrix logits = shapenet_forward(model.params, batch, &cache);
            const auto ce = cross_entropy(logits, targets);
            check_loss_finite(ce.loss, epoch, batch_no);
            loss_sum += ce.loss * static_cast<double>(end - begin);
            for (std::size_t i = 0; i < batch.rows(); ++i) {
                std::size_t best = 0;
                for (std::size_t j = 1; j < logits.cols(); ++j)
                    if (logits(i, j) > logits(i, best)) best = j;
                hits += static_cast<int>(best) == targets[i];
            }

            ShapeNetParams grads = shapenet_backward(ce.d_logits, cache, model.params);
            std::vector<const Matrix*> grad_list;
            grads.for_each_tensor(
                [&](const std::string&, const Matrix& m) { grad_list.push_back(&m); });
            adam.step(param_list, grad_list, config.lr);
        }

        const EvalMetrics val = evaluate_shapenet(model, x_val, y_val, config.batch_size);

        EpochMetrics em;
        em.epoch = epoch + 1;
        em.train_loss = loss_sum / static_cast<double>(n_train);
        em.train_accuracy = static_cast<double>(hits) / static_cast<double>(n_train);
        em.val_loss = val.loss;
        em.val_accuracy = val.accuracy;
        result.history.push_back(em);

        if (val.accuracy > best_accuracy) {
            best_accuracy = val.accuracy;
            result.best_model = model;
            result.best_epoch = epoch + 1;
            result.best_val = val;
        }
    }
    result.final_model = std::move(model);
    return result;
}

CrossValidationResult cross_validate_shapenet(const Dataset& dataset,
                                              const ShapeVocab& vocab,
                                              const ShapeNetConfig& model_config,
                                              const TrainConfig& config) {
    config.validate();
    const auto folds = kfold(dataset.size(), config.folds, config.seed);

    CrossValidationResult result;
    result.folds.resize(folds.size());
    std::vector<std::exception_ptr> errors(folds.size());

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(
                                     folds.size(), std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t f = next.fetch_add(1);
                if (f >= folds.size()) return;
                try {
                    std::vector<std::size_t> train_idx;
                    for (std::size_t other = 0; other < folds.size(); ++other)
                        if (other != f)
                            train_idx.insert(train_idx.end(), folds[other].begin(),
                                             folds[other].end());
                    result.folds[f] = train_shapenet_split(
                        dataset, vocab, train_idx, folds[f], model_config, config,
                        mix_seed(config.seed, 0xcf01d + f));
                } catch (...) {
                    errors[f] = std::current_exception();
                }
            }
        });
    }
    for (auto& thread : pool) thread.join();
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);

    double sum = 0.0;
    for (const auto& fold : result.folds) {
        result.fold_accuracy.push_back(fold.best_val.accuracy);
        sum += fold.best_val.accuracy;
    }
    result.mean_accuracy = sum / static_cast<double>(result.folds.size());
    double variance = 0.0;
    for (double accuracy : result.fold_accuracy) {
        const double d = accuracy - result.mean_accuracy;
        variance += d * d;
    }
    result.stddev_accuracy =
        std::sqrt(variance / static_cast<double>(result.fold_accuracy.size()));

    for (std::size_t f = 1; f < result.fold_accuracy.size(); ++f)
        if (result.fold_accuracy[f] > result.fold_accuracy[result.best_fold])
            result.best_fold = f;
    return result;
}

}  // namespace gs
