#pragma once

#include <cstdint>
#include <vector>

#include "numerics/matrix.hpp"

namespace gs {

enum class Mode { kTrain, kInfer };

// Every forward primitive fills a cache holding exactly the activations its
// backward pass needs. A cache may be consumed once; reuse is a logic error.

struct FcCache {
    Matrix input;
    bool consumed = false;
};

struct FcGrads {
    Matrix d_input;
    Matrix d_weight;
    Matrix d_bias;  // 1 x out
};

// output = input * weight + bias (bias broadcast over rows)
Matrix fc_forward(const Matrix& input, const Matrix& weight, const Matrix& bias,
                  FcCache* cache = nullptr);
FcGrads fc_backward(const Matrix& upstream, FcCache& cache, const Matrix& weight);

struct BatchNormParams {
    Matrix gamma;  // 1 x C
    Matrix beta;   // 1 x C
};

struct BatchNormStats {
    Matrix running_mean;  // 1 x C
    Matrix running_var;   // 1 x C
    static BatchNormStats identity(std::size_t cols);
};

struct BatchNormConfig {
    double eps = 1e-5;
    double momentum = 0.9;  // fraction of the old running stat kept per update
};

struct BatchNormCache {
    Matrix x_hat;
    std::vector<double> inv_std;
    Mode mode = Mode::kTrain;
    bool consumed = false;
};

struct BatchNormGrads {
    Matrix d_input;
    Matrix d_gamma;
    Matrix d_beta;
};

// Train mode standardizes by batch mean / population variance and updates the
// running stats in place; infer mode uses the running stats only.
Matrix batchnorm_forward(const Matrix& input, const BatchNormParams& params,
                         BatchNormStats& stats, const BatchNormConfig& config, Mode mode,
                         BatchNormCache* cache = nullptr);
BatchNormGrads batchnorm_backward(const Matrix& upstream, BatchNormCache& cache,
                                  const BatchNormParams& params);

struct GluCache {
    Matrix value_half;
    Matrix gate_sigmoid;
    bool consumed = false;
};

// [batch x 2k] -> [batch x k]: first half gated by sigmoid of second half.
Matrix glu_forward(const Matrix& input, GluCache* cache = nullptr);
Matrix glu_backward(const Matrix& upstream, GluCache& cache);

struct ReluCache {
    Matrix input;
    bool consumed = false;
};

Matrix relu(const Matrix& input, ReluCache* cache = nullptr);
Matrix relu_backward(const Matrix& upstream, ReluCache& cache);

struct SigmoidCache {
    Matrix output;
    bool consumed = false;
};

Matrix sigmoid(const Matrix& input, SigmoidCache* cache = nullptr);
Matrix sigmoid_backward(const Matrix& upstream, SigmoidCache& cache);

struct SoftmaxCache {
    Matrix output;
    bool consumed = false;
};

Matrix softmax_rows(const Matrix& input, SoftmaxCache* cache = nullptr);
Matrix softmax_rows_backward(const Matrix& upstream, SoftmaxCache& cache);

// Euclidean projection onto the probability simplex.
std::vector<double> sparsemax(const std::vector<double>& input);

struct SparsemaxCache {
    // 1 when the entry is in the support (output > 0), else 0.
    Matrix support;
    std::vector<double> support_size;  // per row
    bool consumed = false;
};

// Row-wise sparsemax. Entries flagged in `exclude` (same shape, nonzero =
// excluded) are removed from the projection and receive exactly 0; used for
// attention features whose prior-scale budget is exhausted.
Matrix sparsemax_rows(const Matrix& input, SparsemaxCache* cache = nullptr,
                      const Matrix* exclude = nullptr);
Matrix sparsemax_rows_backward(const Matrix& upstream, SparsemaxCache& cache);

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix d_logits;  // (softmax - one_hot) / batch
};

// Mean over the batch of -log softmax(logits)[target].
CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& targets);

// Throws std::runtime_error naming `where` if any entry is non-finite.
void require_finite(const Matrix& m, const char* where);

}  // namespace gs
