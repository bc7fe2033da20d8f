#include "model/shapenet.hpp"

#include <cmath>
#include <stdexcept>

#include "common/rng.hpp"

namespace gs {

void ShapeNetConfig::validate() const {
    if (widths.size() != 6)
        throw std::invalid_argument("ShapeNetConfig: exactly 5 FC layers (6 widths), got " +
                                    std::to_string(widths.size()) + " widths");
    if (widths.back() != kShapeClassCount)
        throw std::invalid_argument("ShapeNetConfig: output width must be " +
                                    std::to_string(kShapeClassCount));
    for (std::size_t w : widths)
        if (w == 0) throw std::invalid_argument("ShapeNetConfig: zero layer width");
}

ShapeNetParams ShapeNetParams::init(const ShapeNetConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(mix_seed(seed, 0x5a9e));
    ShapeNetParams params;
    for (std::size_t l = 0; l + 1 < config.widths.size(); ++l) {
        const std::size_t fan_in = config.widths[l];
        const std::size_t fan_out = config.widths[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (std::size_t i = 0; i < fan_in; ++i)
            for (std::size_t j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-limit, limit);
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(1, fan_out, 0.0);
    }
    return params;
}

ShapeNetParams ShapeNetParams::zeros_like(const ShapeNetParams& other) {
    ShapeNetParams zero = other;
    zero.for_each_tensor([](const std::string&, Matrix& m) { m.fill(0.0); });
    return zero;
}

namespace {

template <typename Params, typename Fn>
void shapenet_tensors(Params& p, const Fn& fn) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        fn("fc." + std::to_string(l) + ".w", p.weights[l]);
        fn("fc." + std::to_string(l) + ".b", p.biases[l]);
    }
}

}  // namespace

void ShapeNetParams::for_each_tensor(
    const std::function<void(const std::string&, Matrix&)>& fn) {
    shapenet_tensors(*this, fn);
}

void ShapeNetParams::for_each_tensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
    shapenet_tensors(*this, fn);
}

Matrix shapenet_forward(const ShapeNetParams& params, const Matrix& batch,
                        ShapeNetForwardCache* cache) {
    if (params.weights.empty()) throw std::invalid_argument("shapenet_forward: empty params");
    if (batch.cols() != params.weights.front().rows())
        throw std::invalid_argument("shapenet_forward: expected " +
                                    std::to_string(params.weights.front().rows()) +
                                    " features, got " + batch.shape_str());
    if (cache) {
        cache->fc.assign(params.weights.size(), FcCache{});
        cache->relu.assign(params.weights.size() - 1, ReluCache{});
        cache->consumed = false;
    }
    Matrix h = batch;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        h = fc_forward(h, params.weights[l], params.biases[l], cache ? &cache->fc[l] : nullptr);
        if (l + 1 < params.weights.size())
            h = relu(h, cache ? &cache->relu[l] : nullptr);
    }
    return h;
}

ShapeNetParams shapenet_backward(const Matrix& d_logits, ShapeNetForwardCache& cache,
                                 const ShapeNetParams& params) {
    if (cache.consumed) throw std::logic_error("shapenet_backward: cache already consumed");
    cache.consumed = true;

    ShapeNetParams grads = ShapeNetParams::zeros_like(params);
    Matrix d = d_logits;
    for (std::size_t l = params.weights.size(); l-- > 0;) {
        FcGrads fc_grads = fc_backward(d, cache.fc[l], params.weights[l]);
        grads.weights[l] += fc_grads.d_weight;
        grads.biases[l] += fc_grads.d_bias;
        d = std::move(fc_grads.d_input);
        if (l > 0) d = relu_backward(d, cache.relu[l - 1]);
    }
    return grads;
}

std::vector<ShapePrediction> shapenet_predict(const ShapeNetParams& params,
                                              const Matrix& batch) {
    const Matrix probs = softmax_rows(shapenet_forward(params, batch));
    std::vector<ShapePrediction> predictions(batch.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.cols(); ++j)
            if (probs(i, j) > probs(i, best)) best = j;  // ties keep the lowest index
        predictions[i].shape_class = static_cast<int>(best);
        predictions[i].confidence = probs(i, best);
    }
    return predictions;
}

}  // namespace gs
