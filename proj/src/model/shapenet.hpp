#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dataio/schema.hpp"
#include "numerics/layers.hpp"
#include "numerics/matrix.hpp"

namespace gs {

// 5 fully connected layers, relu between them, 13-way logits out.
struct ShapeNetConfig {
    std::vector<std::size_t> widths = {kShapeFeatureCount, 64, 128, 64, 32,
                                       kShapeClassCount};

    std::size_t layer_count() const { return widths.size() - 1; }
    void validate() const;
};

struct ShapeNetParams {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;

    static ShapeNetParams init(const ShapeNetConfig& config, std::uint64_t seed);
    static ShapeNetParams zeros_like(const ShapeNetParams& other);

    void for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn);
    void for_each_tensor(
        const std::function<void(const std::string&, const Matrix&)>& fn) const;
};

struct ShapeNetForwardCache {
    std::vector<FcCache> fc;
    std::vector<ReluCache> relu;
    bool consumed = false;
};

Matrix shapenet_forward(const ShapeNetParams& params, const Matrix& batch,
                        ShapeNetForwardCache* cache = nullptr);
ShapeNetParams shapenet_backward(const Matrix& d_logits, ShapeNetForwardCache& cache,
                                 const ShapeNetParams& params);

struct ShapePrediction {
    int shape_class = 0;
    double confidence = 0.0;
};

std::vector<ShapePrediction> shapenet_predict(const ShapeNetParams& params,
                                              const Matrix& batch);

}  // namespace gs
