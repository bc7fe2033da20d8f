#pragma once

// Deliberately naive straight-line re-implementations of both forward passes,
// used as equivalence oracles for the library paths. These share parameter
// VALUES with the real models but no layer code: plain nested loops over
// std::vector, a bisection-based simplex projection, and scalar math only.

#include <array>
#include <cmath>
#include <vector>

#include "model/shapenet.hpp"
#include "model/slipnet.hpp"

namespace gs::naive {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const Matrix& m) {
    Rows rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

inline std::vector<double> fc_one(const std::vector<double>& x, const Matrix& w,
                                  const Matrix& b) {
    std::vector<double> out(w.cols(), 0.0);
    for (std::size_t j = 0; j < w.cols(); ++j) {
        double acc = b(0, j);
        for (std::size_t k = 0; k < w.rows(); ++k) acc += x[k] * w(k, j);
        out[j] = acc;
    }
    return out;
}

inline double naive_sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Batch norm over explicit column statistics (train) or running stats (infer).
inline Rows batchnorm(const Rows& x, const BatchNormParams& p, const BatchNormStats& stats,
                      double eps, bool train) {
    const std::size_t n = x.size(), c = x.front().size();
    Rows out(n, std::vector<double>(c));
    for (std::size_t j = 0; j < c; ++j) {
        double mean, var;
        if (train) {
            mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += x[i][j];
            mean /= static_cast<double>(n);
            var = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                var += (x[i][j] - mean) * (x[i][j] - mean);
            var /= static_cast<double>(n);
        } else {
            mean = stats.running_mean(0, j);
            var = stats.running_var(0, j);
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i][j] = p.gamma(0, j) * (x[i][j] - mean) / std::sqrt(var + eps) +
                        p.beta(0, j);
    }
    return out;
}

// Simplex projection by bisection on the threshold; excluded entries get 0.
inline std::vector<double> project_simplex(const std::vector<double>& z,
                                           const std::vector<bool>& excluded) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (excluded[j]) continue;
        lo = std::min(lo, z[j]);
        hi = std::max(hi, z[j]);
    }
    lo -= 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double sum = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (!excluded[j]) sum += std::max(z[j] - mid, 0.0);
        (sum > 1.0 ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    std::vector<double> out(z.size(), 0.0);
    for (std::size_t j = 0; j < z.size(); ++j)
        if (!excluded[j]) out[j] = std::max(z[j] - tau, 0.0);
    return out;
}

struct SlipLogits {
    std::vector<std::array<double, 2>> slip;
    std::vector<std::array<double, 2>> crumple;
};

inline Rows glu_block(const Rows& input, const GluBlockParams& block,
                      const BatchNormStats& stats, double eps, bool train) {
    Rows pre(input.size());
    for (std::size_t i = 0; i < input.size(); ++i)
        pre[i] = fc_one(input[i], block.fc_w, block.fc_b);
    Rows normed = batchnorm(pre, block.bn, stats, eps, train);
    const std::size_t half = normed.front().size() / 2;
    Rows out(input.size(), std::vector<double>(half));
    for (std::size_t i = 0; i < input.size(); ++i)
        for (std::size_t j = 0; j < half; ++j)
            out[i][j] = normed[i][j] * naive_sigmoid(normed[i][half + j]);
    if (half == input.front().size()) {
        const double scale = std::sqrt(0.5);
        for (std::size_t i = 0; i < input.size(); ++i)
            for (std::size_t j = 0; j < half; ++j)
                out[i][j] = (out[i][j] + input[i][j]) * scale;
    }
    return out;
}

inline SlipLogits slipnet_forward(const SlipNetParams& params, const SlipNetState& state,
                                  const SlipNetConfig& config, const Matrix& batch,
                                  bool train) {
    const std::size_t n = batch.rows();
    const std::size_t f = config.feature_dim;
    const double eps = config.bn.eps;

    Rows x = batchnorm(to_rows(batch), params.input_bn, state.input_bn, eps, train);

    Rows h = x;
    for (std::size_t b = 0; b < params.shared.size(); ++b)
        h = glu_block(h, params.shared[b], state.shared[b], eps, train);

    Rows attention(n, std::vector<double>(config.attention_dim));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < config.attention_dim; ++j)
            attention[i][j] = h[i][config.decision_dim + j];

    Rows prior(n, std::vector<double>(f, 1.0));
    Rows decision_sum(n, std::vector<double>(config.decision_dim, 0.0));

    for (std::size_t s = 0; s < config.n_steps; ++s) {
        Rows raw(n);
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = fc_one(attention[i], params.attentive[s].fc_w, params.attentive[s].fc_b);
        Rows u = batchnorm(raw, params.attentive[s].bn, state.attentive[s], eps, train);

        Rows mask(n, std::vector<double>(f));
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> z(f);
            std::vector<bool> excluded(f, false);
            for (std::size_t j = 0; j < f; ++j) {
                z[j] = prior[i][j] * u[i][j];
                excluded[j] = prior[i][j] == 0.0;
            }
            mask[i] = project_simplex(z, excluded);
        }

        Rows masked(n, std::vector<double>(f));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < f; ++j) masked[i][j] = mask[i][j] * x[i][j];

        Rows hs = masked;
        for (std::size_t b = 0; b < params.shared.size(); ++b)
            hs = glu_block(hs, params.shared[b], state.shared[b], eps, train);
        for (std::size_t b = 0; b < params.step_specific[s].size(); ++b)
            hs = glu_block(hs, params.step_specific[s][b], state.step_specific[s][b], eps,
                           train);

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < config.decision_dim; ++j)
                decision_sum[i][j] += std::max(hs[i][j], 0.0);
            for (std::size_t j = 0; j < config.attention_dim; ++j)
                attention[i][j] = hs[i][config.decision_dim + j];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < f; ++j)
                prior[i][j] = prior[i][j] * (config.relaxation - mask[i][j]);
    }

    SlipLogits logits;
    logits.slip.resize(n);
    logits.crumple.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> head =
            fc_one(decision_sum[i], params.head_w, params.head_b);
        logits.slip[i] = {head[0], head[1]};
        logits.crumple[i] = {head[2], head[3]};
    }
    return logits;
}

inline Rows shapenet_forward(const ShapeNetParams& params, const Matrix& batch) {
    Rows x = to_rows(batch);
    Rows out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> h = x[i];
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            h = fc_one(h, params.weights[l], params.biases[l]);
            if (l + 1 < params.weights.size())
                for (double& v : h) v = std::max(v, 0.0);
        }
        out[i] = std::move(h);
    }
    return out;
}

}  // namespace gs::naive
