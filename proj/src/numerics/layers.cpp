#include "numerics/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gs {

namespace {

void consume(bool& flag, const char* where) {
    if (flag)
        throw std::logic_error(std::string(where) + ": cache already consumed");
    flag = true;
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

void require_finite(const Matrix& m, const char* where) {
    if (!m.all_finite())
        throw std::runtime_error(std::string(where) + ": non-finite value detected");
}

Matrix fc_forward(const Matrix& input, const Matrix& weight, const Matrix& bias,
                  FcCache* cache) {
    if (input.cols() != weight.rows())
        throw std::invalid_argument("fc_forward: input " + input.shape_str() +
                                    " does not match weight " + weight.shape_str());
    require_shape(bias, 1, weight.cols(), "fc_forward bias");
    Matrix out = matmul(input, weight);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* row = out.row(i);
        const double* b = bias.row(0);
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] += b[j];
    }
    if (cache) *cache = FcCache{input};
    return out;
}

FcGrads fc_backward(const Matrix& upstream, FcCache& cache, const Matrix& weight) {
    consume(cache.consumed, "fc_backward");
    if (upstream.rows() != cache.input.rows() || upstream.cols() != weight.cols())
        throw std::invalid_argument("fc_backward: upstream " + upstream.shape_str() +
                                    " does not match forward shapes");
    FcGrads grads;
    grads.d_weight = matmul_transpose_a(cache.input, upstream);
    grads.d_input = matmul_transpose_b(upstream, weight);
    grads.d_bias = Matrix(1, upstream.cols());
    for (std::size_t i = 0; i < upstream.rows(); ++i) {
        const double* row = upstream.row(i);
        double* acc = grads.d_bias.row(0);
        for (std::size_t j = 0; j < upstream.cols(); ++j) acc[j] += row[j];
    }
    return grads;
}

BatchNormStats BatchNormStats::identity(std::size_t cols) {
    BatchNormStats s;
    s.running_mean = Matrix(1, cols, 0.0);
    s.running_var = Matrix(1, cols, 1.0);
    return s;
}

Matrix batchnorm_forward(const Matrix& input, const BatchNormParams& params,
                         BatchNormStats& stats, const BatchNormConfig& config, Mode mode,
                         BatchNormCache* cache) {
    const std::size_t n = input.rows(), c = input.cols();
    require_shape(params.gamma, 1, c, "batchnorm gamma");
    require_shape(params.beta, 1, c, "batchnorm beta");
    if (config.eps <= 0.0)
        throw std::invalid_argument("batchnorm_forward: eps must be > 0");
    if (mode == Mode::kTrain && n < 2)
        throw std::invalid_argument(
            "batchnorm_forward: train mode needs batch >= 2, got batch of " +
            std::to_string(n));

    Matrix out(n, c);
    Matrix x_hat(n, c);
    std::vector<double> inv_std(c);

    const double* gamma = params.gamma.row(0);
    const double* beta = params.beta.row(0);

    if (mode == Mode::kTrain) {
        for (std::size_t j = 0; j < c; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += input(i, j);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = input(i, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(n);  // population variance
            const double inv = 1.0 / std::sqrt(var + config.eps);
            inv_std[j] = inv;
            for (std::size_t i = 0; i < n; ++i) {
                const double xh = (input(i, j) - mean) * inv;
                x_hat(i, j) = xh;
                out(i, j) = gamma[j] * xh + beta[j];
            }
            stats.running_mean(0, j) =
                config.momentum * stats.running_mean(0, j) + (1.0 - config.momentum) * mean;
            stats.running_var(0, j) =
                config.momentum * stats.running_var(0, j) + (1.0 - config.momentum) * var;
        }
    } else {
        for (std::size_t j = 0; j < c; ++j) {
            const double inv = 1.0 / std::sqrt(stats.running_var(0, j) + config.eps);
            inv_std[j] = inv;
            const double mean = stats.running_mean(0, j);
            for (std::size_t i = 0; i < n; ++i) {
                const double xh = (input(i, j) - mean) * inv;
                x_hat(i, j) = xh;
                out(i, j) = gamma[j] * xh + beta[j];
            }
        }
    }

    if (cache) {
        cache->x_hat = std::move(x_hat);
        cache->inv_std = std::move(inv_std);
        cache->mode = mode;
        cache->consumed = false;
    }
    return out;
}

BatchNormGrads batchnorm_backward(const Matrix& upstream, BatchNormCache& cache,
                                  const BatchNormParams& params) {
    consume(cache.consumed, "batchnorm_backward");
    require_same_shape(upstream, cache.x_hat, "batchnorm_backward");
    const std::size_t n = upstream.rows(), c = upstream.cols();
    BatchNormGrads grads;
    grads.d_input = Matrix(n, c);
    grads.d_gamma = Matrix(1, c);
    grads.d_beta = Matrix(1, c);

    // Train mode normalizes by statistics of the same batch, so those feed
    // the gradient: dx = gamma * inv_std * (g - mean(g) - x_hat * mean(g*x_hat)).
    // Infer mode treats the running stats as constants.
    for (std::size_t j = 0; j < c; ++j) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = upstream(i, j);
            sum_g += g;
            sum_gx += g * cache.x_hat(i, j);
        }
        grads.d_beta(0, j) = sum_g;
        grads.d_gamma(0, j) = sum_gx;
        const double scale = params.gamma(0, j) * cache.inv_std[j];
        if (cache.mode == Mode::kTrain) {
            const double mean_g = sum_g / static_cast<double>(n);
            const double mean_gx = sum_gx / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                grads.d_input(i, j) =
                    scale * (upstream(i, j) - mean_g - cache.x_hat(i, j) * mean_gx);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                grads.d_input(i, j) = scale * upstream(i, j);
        }
    }
    return grads;
}

Matrix glu_forward(const Matrix& input, GluCache* cache) {
    if (input.cols() % 2 != 0)
        throw std::invalid_argument("glu_forward: needs an even column count, got " +
                                    input.shape_str());
    const std::size_t n = input.rows(), k = input.cols() / 2;
    Matrix out(n, k), value(n, k), gate(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = input.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double v = row[j];
            const double s = stable_sigmoid(row[k + j]);
            value(i, j) = v;
            gate(i, j) = s;
            out(i, j) = v * s;
        }
    }
    if (cache) {
        cache->value_half = std::move(value);
        cache->gate_sigmoid = std::move(gate);
        cache->consumed = false;
    }
    return out;
}

Matrix glu_backward(const Matrix& upstream, GluCache& cache) {
    consume(cache.consumed, "glu_backward");
    require_same_shape(upstream, cache.value_half, "glu_backward");
    const std::size_t n = upstream.rows(), k = upstream.cols();
    Matrix d_input(n, 2 * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double g = upstream(i, j);
            const double s = cache.gate_sigmoid(i, j);
            d_input(i, j) = g * s;
            d_input(i, k + j) = g * cache.value_half(i, j) * s * (1.0 - s);
        }
    }
    return d_input;
}

Matrix relu(const Matrix& input, ReluCache* cache) {
    Matrix out = input;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* row = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] = std::max(row[j], 0.0);
    }
    if (cache) *cache = ReluCache{input};
    return out;
}

Matrix relu_backward(const Matrix& upstream, ReluCache& cache) {
    consume(cache.consumed, "relu_backward");
    require_same_shape(upstream, cache.input, "relu_backward");
    Matrix out = upstream;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            if (cache.input(i, j) <= 0.0) out(i, j) = 0.0;
    return out;
}

Matrix sigmoid(const Matrix& input, SigmoidCache* cache) {
    Matrix out = input;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* row = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] = stable_sigmoid(row[j]);
    }
    if (cache) {
        cache->output = out;
        cache->consumed = false;
    }
    return out;
}

Matrix sigmoid_backward(const Matrix& upstream, SigmoidCache& cache) {
    consume(cache.consumed, "sigmoid_backward");
    require_same_shape(upstream, cache.output, "sigmoid_backward");
    Matrix out = upstream;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) {
            const double s = cache.output(i, j);
            out(i, j) *= s * (1.0 - s);
        }
    return out;
}

Matrix softmax_rows(const Matrix& input, SoftmaxCache* cache) {
    Matrix out(input.rows(), input.cols());
    for (std::size_t i = 0; i < input.rows(); ++i) {
        const double* src = input.row(i);
        double* dst = out.row(i);
        double max_v = src[0];
        for (std::size_t j = 1; j < input.cols(); ++j) max_v = std::max(max_v, src[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < input.cols(); ++j) {
            dst[j] = std::exp(src[j] - max_v);
            sum += dst[j];
        }
        for (std::size_t j = 0; j < input.cols(); ++j) dst[j] /= sum;
    }
    if (cache) {
        cache->output = out;
        cache->consumed = false;
    }
    return out;
}

Matrix softmax_rows_backward(const Matrix& upstream, SoftmaxCache& cache) {
    consume(cache.consumed, "softmax_rows_backward");
    require_same_shape(upstream, cache.output, "softmax_rows_backward");
    const std::size_t n = upstream.rows(), c = upstream.cols();
    Matrix out(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += upstream(i, j) * cache.output(i, j);
        for (std::size_t j = 0; j < c; ++j)
            out(i, j) = cache.output(i, j) * (upstream(i, j) - dot);
    }
    return out;
}

namespace {

// Sort-based simplex projection over the non-excluded entries of one row.
// Writes outputs and support flags; returns the support size.
std::size_t sparsemax_row(const double* z, const double* exclude, std::size_t n,
                          double* out, double* support) {
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (exclude && exclude[j] != 0.0) continue;
        if (!std::isfinite(z[j]))
            throw std::invalid_argument("sparsemax: non-finite input");
        order.push_back(j);
    }
    if (order.empty())
        throw std::invalid_argument("sparsemax: every entry excluded");
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

    double cumulative = 0.0;
    double tau = 0.0;
    std::size_t k = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const double zr = z[order[r]];
        cumulative += zr;
        const double candidate = (cumulative - 1.0) / static_cast<double>(r + 1);
        if (zr > candidate) {
            tau = candidate;
            k = r + 1;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = 0.0;
        support[j] = 0.0;
    }
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t j = order[r];
        out[j] = z[j] - tau;
        support[j] = 1.0;
    }
    return k;
}

}  // namespace

std::vector<double> sparsemax(const std::vector<double>& input) {
    std::vector<double> out(input.size());
    std::vector<double> support(input.size());
    sparsemax_row(input.data(), nullptr, input.size(), out.data(), support.data());
    return out;
}

Matrix sparsemax_rows(const Matrix& input, SparsemaxCache* cache, const Matrix* exclude) {
    if (exclude) require_same_shape(input, *exclude, "sparsemax_rows exclude");
    const std::size_t n = input.rows(), c = input.cols();
    Matrix out(n, c);
    Matrix support(n, c);
    std::vector<double> sizes(n);
    for (std::size_t i = 0; i < n; ++i) {
        sizes[i] = static_cast<double>(sparsemax_row(
            input.row(i), exclude ? exclude->row(i) : nullptr, c, out.row(i), support.row(i)));
    }
    if (cache) {
        cache->support = std::move(support);
        cache->support_size = std::move(sizes);
        cache->consumed = false;
    }
    return out;
}

Matrix sparsemax_rows_backward(const Matrix& upstream, SparsemaxCache& cache) {
    consume(cache.consumed, "sparsemax_rows_backward");
    require_same_shape(upstream, cache.support, "sparsemax_rows_backward");
    const std::size_t n = upstream.rows(), c = upstream.cols();
    // Projection Jacobian: on-support entries get (I - 11^T / k), the rest 0.
    Matrix out(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j)
            if (cache.support(i, j) != 0.0) sum += upstream(i, j);
        const double mean = sum / cache.support_size[i];
        for (std::size_t j = 0; j < c; ++j)
            out(i, j) = cache.support(i, j) != 0.0 ? upstream(i, j) - mean : 0.0;
    }
    return out;
}

CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& targets) {
    const std::size_t n = logits.rows(), c = logits.cols();
    if (targets.size() != n)
        throw std::invalid_argument("cross_entropy: " + std::to_string(targets.size()) +
                                    " targets for " + std::to_string(n) + " rows");
    CrossEntropyResult result;
    result.d_logits = Matrix(n, c);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int t = targets[i];
        if (t < 0 || static_cast<std::size_t>(t) >= c)
            throw std::invalid_argument("cross_entropy: target " + std::to_string(t) +
                                        " out of range at row " + std::to_string(i));
        const double* src = logits.row(i);
        double max_v = src[0];
        for (std::size_t j = 1; j < c; ++j) max_v = std::max(max_v, src[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum += std::exp(src[j] - max_v);
        const double log_sum = std::log(sum) + max_v;
        total += log_sum - src[t];
        double* grad = result.d_logits.row(i);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < c; ++j)
            grad[j] = std::exp(src[j] - log_sum) * inv_n;
        grad[t] -= inv_n;
    }
    result.loss = total / static_cast<double>(n);
    return result;
}

}  // namespace gs
