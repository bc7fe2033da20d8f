#pragma once

// Finite-difference checks for every layer primitive, shared between the
// unit suite and the acceptance suite (which runs them at full trial count).
// Scalar objective for matrix-valued primitives: sum(output * L) for a fixed
// random weighting L, whose gradient w.r.t. the output is exactly L.

#include <algorithm>
#include <cmath>
#include <string>

#include "numerics/layers.hpp"
#include "test_support.hpp"

namespace gs::testing {

inline double weighted_sum(const Matrix& out, const Matrix& weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) total += out(i, j) * weights(i, j);
    return total;
}

struct GradCheckReport {
    double worst = 0.0;
    std::string worst_case;

    void update(double err, const std::string& label) {
        if (err > worst) {
            worst = err;
            worst_case = label;
        }
    }
};

inline void check_fc(Rng& rng, GradCheckReport& report, int trial) {
    Matrix input = random_matrix(rng, 3, 4);
    Matrix weight = random_matrix(rng, 4, 5);
    Matrix bias = random_matrix(rng, 1, 5);
    const Matrix weighting = random_matrix(rng, 3, 5, -1.0, 1.0);

    FcCache cache;
    fc_forward(input, weight, bias, &cache);
    FcGrads grads = fc_backward(weighting, cache, weight);

    const std::string label = "fc/" + std::to_string(trial);
    auto eval_in = [&] { return weighted_sum(fc_forward(input, weight, bias), weighting); };
    report.update(max_grad_error(eval_in, input, grads.d_input), label + "/input");
    report.update(max_grad_error(eval_in, weight, grads.d_weight), label + "/weight");
    report.update(max_grad_error(eval_in, bias, grads.d_bias), label + "/bias");
}

inline void check_batchnorm(Rng& rng, GradCheckReport& report, int trial, Mode mode) {
    Matrix input = random_matrix(rng, 6, 4);
    BatchNormParams params{random_matrix(rng, 1, 4, 0.5, 1.5), random_matrix(rng, 1, 4)};
    BatchNormStats stats = BatchNormStats::identity(4);
    stats.running_mean = random_matrix(rng, 1, 4, -0.5, 0.5);
    stats.running_var = random_matrix(rng, 1, 4, 0.5, 1.5);
    const BatchNormConfig config;
    const Matrix weighting = random_matrix(rng, 6, 4, -1.0, 1.0);

    BatchNormCache cache;
    {
        BatchNormStats scratch = stats;
        batchnorm_forward(input, params, scratch, config, mode, &cache);
    }
    BatchNormGrads grads = batchnorm_backward(weighting, cache, params);

    auto eval = [&] {
        BatchNormStats scratch = stats;
        return weighted_sum(batchnorm_forward(input, params, scratch, config, mode),
                            weighting);
    };
    const std::string label =
        std::string("batchnorm/") + (mode == Mode::kTrain ? "train/" : "infer/") +
        std::to_string(trial);
    report.update(max_grad_error(eval, input, grads.d_input), label + "/input");
    report.update(max_grad_error(eval, params.gamma, grads.d_gamma), label + "/gamma");
    report.update(max_grad_error(eval, params.beta, grads.d_beta), label + "/beta");
}

inline void check_glu(Rng& rng, GradCheckReport& report, int trial) {
    Matrix input = random_matrix(rng, 4, 6);
    const Matrix weighting = random_matrix(rng, 4, 3, -1.0, 1.0);
    GluCache cache;
    glu_forward(input, &cache);
    Matrix d_input = glu_backward(weighting, cache);
    auto eval = [&] { return weighted_sum(glu_forward(input), weighting); };
    report.update(max_grad_error(eval, input, d_input),
                  "glu/" + std::to_string(trial));
}

inline void check_relu(Rng& rng, GradCheckReport& report, int trial) {
    // Finite differences are invalid at the kink; keep inputs away from 0.
    Matrix input = random_matrix(rng, 4, 5);
    for (std::size_t i = 0; i < input.rows(); ++i)
        for (std::size_t j = 0; j < input.cols(); ++j)
            if (std::abs(input(i, j)) < 1e-3) input(i, j) = 1e-3;
    const Matrix weighting = random_matrix(rng, 4, 5, -1.0, 1.0);
    ReluCache cache;
    relu(input, &cache);
    Matrix d_input = relu_backward(weighting, cache);
    auto eval = [&] { return weighted_sum(relu(input), weighting); };
    report.update(max_grad_error(eval, input, d_input),
                  "relu/" + std::to_string(trial));
}

inline void check_sigmoid(Rng& rng, GradCheckReport& report, int trial) {
    Matrix input = random_matrix(rng, 3, 4);
    const Matrix weighting = random_matrix(rng, 3, 4, -1.0, 1.0);
    SigmoidCache cache;
    sigmoid(input, &cache);
    Matrix d_input = sigmoid_backward(weighting, cache);
    auto eval = [&] { return weighted_sum(sigmoid(input), weighting); };
    report.update(max_grad_error(eval, input, d_input),
                  "sigmoid/" + std::to_string(trial));
}

inline void check_softmax(Rng& rng, GradCheckReport& report, int trial) {
    Matrix input = random_matrix(rng, 3, 5);
    const Matrix weighting = random_matrix(rng, 3, 5, -1.0, 1.0);
    SoftmaxCache cache;
    softmax_rows(input, &cache);
    Matrix d_input = softmax_rows_backward(weighting, cache);
    auto eval = [&] { return weighted_sum(softmax_rows(input), weighting); };
    report.update(max_grad_error(eval, input, d_input),
                  "softmax/" + std::to_string(trial));
}

// Sparsemax is piecewise linear; rows whose entries sit close to the support
// threshold are resampled because central differences straddle the kink there.
inline Matrix sparsemax_test_rows(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix input(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            std::vector<double> z(cols);
            for (auto& v : z) v = rng.uniform(-2.0, 2.0);
            const std::vector<double> p = sparsemax(z);
            double tau = 0.0;
            for (std::size_t j = 0; j < cols; ++j)
                if (p[j] > 0.0) tau = z[j] - p[j];
            double margin = 2.0;
            for (std::size_t j = 0; j < cols; ++j)
                margin = std::min(margin, std::abs(z[j] - tau));
            if (margin > 1e-3) {
                for (std::size_t j = 0; j < cols; ++j) input(i, j) = z[j];
                break;
            }
        }
    }
    return input;
}

inline void check_sparsemax(Rng& rng, GradCheckReport& report, int trial) {
    Matrix input = sparsemax_test_rows(rng, 3, 7);
    const Matrix weighting = random_matrix(rng, 3, 7, -1.0, 1.0);
    SparsemaxCache cache;
    sparsemax_rows(input, &cache);
    Matrix d_input = sparsemax_rows_backward(weighting, cache);
    auto eval = [&] { return weighted_sum(sparsemax_rows(input), weighting); };
    report.update(max_grad_error(eval, input, d_input),
                  "sparsemax/" + std::to_string(trial));
}

inline void check_cross_entropy(Rng& rng, GradCheckReport& report, int trial) {
    Matrix logits = random_matrix(rng, 5, 6);
    std::vector<int> targets(5);
    for (auto& t : targets) t = static_cast<int>(rng.uniform_index(6));
    CrossEntropyResult result = cross_entropy(logits, targets);
    auto eval = [&] { return cross_entropy(logits, targets).loss; };
    report.update(max_grad_error(eval, logits, result.d_logits),
                  "cross_entropy/" + std::to_string(trial));
}

// Runs `trials` seeded random cases through every primitive.
inline GradCheckReport run_primitive_gradchecks(int trials, std::uint64_t seed = 0x6e756d) {
    Rng rng(seed);
    GradCheckReport report;
    for (int t = 0; t < trials; ++t) {
        check_fc(rng, report, t);
        check_batchnorm(rng, report, t, Mode::kTrain);
        check_batchnorm(rng, report, t, Mode::kInfer);
        check_glu(rng, report, t);
        check_relu(rng, report, t);
        check_sigmoid(rng, report, t);
        check_softmax(rng, report, t);
        check_sparsemax(rng, report, t);
        check_cross_entropy(rng, report, t);
    }
    return report;
}

}  // namespace gs::testing
