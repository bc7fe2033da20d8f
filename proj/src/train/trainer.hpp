#pragma once

#include <cstdint>
#include <vector>

#include "dataio/pipeline.hpp"
#include "dataio/schema.hpp"
#include "model/model_io.hpp"
#include "numerics/adam.hpp"
#include "train/metrics.hpp"

namespace gs {

struct TrainConfig {
    Task task = Task::kSlip;
    double lr = 0.02;
    std::size_t epochs = 100;
    std::size_t batch_size = 2048;
    double val_fraction = 0.16;
    std::size_t folds = 10;  // shape-task cross-validation
    std::uint64_t seed = 0;
    AdamConfig adam;

    static TrainConfig slip_defaults();
    static TrainConfig shape_defaults();
    void validate() const;
};

struct SlipTrainResult {
    SlipNetModel best_model;  // snapshot at the best validation joint accuracy
    std::size_t best_epoch = 0;
    EvalMetrics best_val;
    SlipNetModel final_model;
    ScalerParams scaler;  // fitted on the training split only
    std::vector<EpochMetrics> history;
};

struct ShapeTrainResult {
    ShapeNetModel best_model;
    std::size_t best_epoch = 0;
    EvalMetrics best_val;
    ShapeNetModel final_model;
    ScalerParams scaler;
    std::vector<EpochMetrics> history;
};

struct CrossValidationResult {
    std::vector<ShapeTrainResult> folds;
    std::vector<double> fold_accuracy;  // best validation accuracy per fold
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
    std::size_t best_fold = 0;
};

SlipTrainResult train_slipnet(const Dataset& dataset, const ShapeVocab& vocab,
                              const SlipNetConfig& model_config, const TrainConfig& config);

// Trains on explicit train/validation index sets (used directly and by CV).
ShapeTrainResult train_shapenet_split(const Dataset& dataset, const ShapeVocab& vocab,
                                      const std::vector<std::size_t>& train_idx,
                                      const std::vector<std::size_t>& val_idx,
                                      const ShapeNetConfig& model_config,
                                      const TrainConfig& config, std::uint64_t fold_seed);

// k-fold CV; folds run in parallel (results merged by fold index, so the
// outcome does not depend on scheduling).
CrossValidationResult cross_validate_shapenet(const Dataset& dataset,
                                              const ShapeVocab& vocab,
                                              const ShapeNetConfig& model_config,
                                              const TrainConfig& config);

EvalMetrics evaluate_slipnet(const SlipNetModel& model, const Matrix& scaled_features,
                             const std::vector<int>& slip, const std::vector<int>& crumple,
                             std::size_t batch_size = 2048);
EvalMetrics evaluate_shapenet(const ShapeNetModel& model, const Matrix& scaled_features,
                              const std::vector<int>& shape, std::size_t batch_size = 2048);

}  // namespace gs
