#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataio/schema.hpp"
#include "numerics/matrix.hpp"

namespace gs {

// Feature layouts. Timestamps never enter a feature vector.
//   shape task: torque[16], angle[16], mass                  -> 33 columns
//   slip task:  torque[16], angle[16], mass, shape code      -> 34 columns
Matrix shape_features(const std::vector<TelemetryFrame>& frames);
Matrix slip_features(const std::vector<TelemetryFrame>& frames, const ShapeVocab& vocab);

std::vector<int> encode_shapes(const std::vector<TelemetryFrame>& frames,
                               const ShapeVocab& vocab);
std::vector<int> encode_sizes(const std::vector<TelemetryFrame>& frames,
                              const SizeVocab& vocab);
std::vector<int> slip_targets(const std::vector<GraspLabel>& labels);
std::vector<int> crumple_targets(const std::vector<GraspLabel>& labels);

// Per-feature min/max observed on the training split.
struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;

    bool fitted() const { return !min.empty(); }
    std::size_t features() const { return min.size(); }
};

ScalerParams fit_minmax(const Matrix& train_rows);
// (x - min) / (max - min); a constant column maps to 0; values outside the
// training range are not clipped. Throws if the scaler is unfitted.
Matrix apply_minmax(const Matrix& rows, const ScalerParams& scaler);

void save_scaler(const std::string& path, const ScalerParams& scaler);
ScalerParams load_scaler(const std::string& path);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Deterministic shuffled split; |validation| = round(fraction * n).
SplitIndices shuffle_split(std::size_t n, double val_fraction, std::uint64_t seed);

// k disjoint, exhaustive folds with sizes differing by at most one.
std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k,
                                            std::uint64_t seed);

Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices);

template <typename T>
std::vector<T> gather(const std::vector<T>& source, const std::vector<std::size_t>& indices) {
    std::vector<T> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) out.push_back(source[idx]);
    return out;
}

}  // namespace gs
