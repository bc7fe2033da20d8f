#include "model/slipnet.hpp"

#include <cmath>
#include <stdexcept>

#include "common/rng.hpp"

namespace gs {

namespace {

constexpr double kResidualScale = 0.70710678118654752440;  // sqrt(0.5)

Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (std::size_t i = 0; i < fan_in; ++i)
        for (std::size_t j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-limit, limit);
    return w;
}

GluBlockParams init_block(std::size_t in_dim, std::size_t glu_dim, Rng& rng) {
    GluBlockParams block;
    block.fc_w = xavier_uniform(in_dim, glu_dim, rng);
    block.fc_b = Matrix(1, glu_dim, 0.0);
    block.bn.gamma = Matrix(1, glu_dim, 1.0);
    block.bn.beta = Matrix(1, glu_dim, 0.0);
    return block;
}

BatchNormParams init_bn(std::size_t dim) {
    return BatchNormParams{Matrix(1, dim, 1.0), Matrix(1, dim, 0.0)};
}

Matrix split_left(const Matrix& m, std::size_t cols) {
    Matrix out(m.rows(), cols);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = m(i, j);
    return out;
}

Matrix split_right(const Matrix& m, std::size_t cols) {
    const std::size_t offset = m.cols() - cols;
    Matrix out(m.rows(), cols);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = m(i, offset + j);
    return out;
}

Matrix concat_cols(const Matrix& left, const Matrix& right) {
    Matrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        for (std::size_t j = 0; j < left.cols(); ++j) out(i, j) = left(i, j);
        for (std::size_t j = 0; j < right.cols(); ++j) out(i, left.cols() + j) = right(i, j);
    }
    return out;
}

// fc -> bn -> glu, with a sqrt(0.5)-scaled residual whenever dims allow.
Matrix glu_block_forward(const Matrix& fc_w, const Matrix& fc_b, const BatchNormParams& bn,
                         BatchNormStats& stats, const BatchNormConfig& bn_cfg,
                         const Matrix& input, Mode mode, GluBlockCache* cache,
                         const std::string& where) {
    FcCache* fc_cache = cache ? &cache->fc : nullptr;
    BatchNormCache* bn_cache = cache ? &cache->bn : nullptr;
    GluCache* glu_cache = cache ? &cache->glu : nullptr;

    Matrix h = fc_forward(input, fc_w, fc_b, fc_cache);
    h = batchnorm_forward(h, bn, stats, bn_cfg, mode, bn_cache);
    h = glu_forward(h, glu_cache);
    const bool residual = h.cols() == input.cols();
    if (residual) {
        for (std::size_t i = 0; i < h.rows(); ++i) {
            double* dst = h.row(i);
            const double* src = input.row(i);
            for (std::size_t j = 0; j < h.cols(); ++j)
                dst[j] = (dst[j] + src[j]) * kResidualScale;
        }
    }
    if (cache) cache->residual = residual;
    if (!h.all_finite())
        throw std::runtime_error("slipnet_forward: non-finite activation in " + where);
    return h;
}

// Returns the gradient w.r.t. the block input; adds parameter gradients.
Matrix glu_block_backward(const Matrix& upstream, GluBlockCache& cache, const Matrix& fc_w,
                          const BatchNormParams& bn, Matrix& d_fc_w, Matrix& d_fc_b,
                          BatchNormParams& d_bn) {
    Matrix d_glu = upstream;
    if (cache.residual) d_glu *= kResidualScale;

    Matrix d_bn_out = glu_backward(d_glu, cache.glu);
    BatchNormGrads bn_grads = batchnorm_backward(d_bn_out, cache.bn, bn);
    d_bn.gamma += bn_grads.d_gamma;
    d_bn.beta += bn_grads.d_beta;
    FcGrads fc_grads = fc_backward(bn_grads.d_input, cache.fc, fc_w);
    d_fc_w += fc_grads.d_weight;
    d_fc_b += fc_grads.d_bias;

    Matrix d_input = std::move(fc_grads.d_input);
    if (cache.residual) {
        for (std::size_t i = 0; i < d_input.rows(); ++i) {
            double* dst = d_input.row(i);
            const double* src = upstream.row(i);
            for (std::size_t j = 0; j < d_input.cols(); ++j)
                dst[j] += src[j] * kResidualScale;
        }
    }
    return d_input;
}

}  // namespace

void SlipNetConfig::validate() const {
    if (n_steps < 1) throw std::invalid_argument("SlipNetConfig: n_steps must be >= 1");
    if (decision_dim < 1 || attention_dim < 1)
        throw std::invalid_argument("SlipNetConfig: decision/attention dims must be >= 1");
    if (relaxation < 1.0)
        throw std::invalid_argument("SlipNetConfig: relaxation must be >= 1");
    if (feature_dim < 1) throw std::invalid_argument("SlipNetConfig: feature_dim empty");
    if (shared_blocks < 1)
        throw std::invalid_argument("SlipNetConfig: needs at least one shared block");
}

SlipNetParams SlipNetParams::init(const SlipNetConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(mix_seed(seed, 0x511b));
    const std::size_t hidden = config.hidden_dim();
    const std::size_t glu_dim = 2 * hidden;

    SlipNetParams params;
    params.input_bn.gamma = Matrix(1, config.feature_dim, 1.0);
    params.input_bn.beta = Matrix(1, config.feature_dim, 0.0);

    for (std::size_t b = 0; b < config.shared_blocks; ++b) {
        const std::size_t in_dim = b == 0 ? config.feature_dim : hidden;
        params.shared_fc_w.push_back(xavier_uniform(in_dim, glu_dim, rng));
        params.shared_fc_b.emplace_back(1, glu_dim, 0.0);
    }
    params.shared_bn.resize(config.n_steps + 1);
    for (std::size_t ctx = 0; ctx <= config.n_steps; ++ctx)
        for (std::size_t b = 0; b < config.shared_blocks; ++b)
            params.shared_bn[ctx].push_back(init_bn(glu_dim));
    params.step_specific.resize(config.n_steps);
    for (std::size_t s = 0; s < config.n_steps; ++s)
        for (std::size_t b = 0; b < config.step_blocks; ++b)
            params.step_specific[s].push_back(init_block(hidden, glu_dim, rng));

    for (std::size_t s = 0; s < config.n_steps; ++s) {
        AttentiveParams attn;
        attn.fc_w = xavier_uniform(config.attention_dim, config.feature_dim, rng);
        attn.fc_b = Matrix(1, config.feature_dim, 0.0);
        attn.bn.gamma = Matrix(1, config.feature_dim, 1.0);
        attn.bn.beta = Matrix(1, config.feature_dim, 0.0);
        params.attentive.push_back(std::move(attn));
    }

    params.head_w = xavier_uniform(config.decision_dim, 4, rng);
    params.head_b = Matrix(1, 4, 0.0);
    return params;
}

SlipNetParams SlipNetParams::zeros_like(const SlipNetParams& other) {
    SlipNetParams zero = other;
    zero.for_each_tensor([](const std::string&, Matrix& m) { m.fill(0.0); });
    return zero;
}

namespace {

template <typename Params, typename Fn>
void slipnet_params_tensors(Params& p, const Fn& fn) {
    fn("input_bn.gamma", p.input_bn.gamma);
    fn("input_bn.beta", p.input_bn.beta);
    for (std::size_t b = 0; b < p.shared_fc_w.size(); ++b) {
        const std::string prefix = "shared." + std::to_string(b) + ".";
        fn(prefix + "fc.w", p.shared_fc_w[b]);
        fn(prefix + "fc.b", p.shared_fc_b[b]);
    }
    for (std::size_t ctx = 0; ctx < p.shared_bn.size(); ++ctx) {
        for (std::size_t b = 0; b < p.shared_bn[ctx].size(); ++b) {
            const std::string prefix =
                "shared_bn." + std::to_string(ctx) + "." + std::to_string(b) + ".";
            fn(prefix + "gamma", p.shared_bn[ctx][b].gamma);
            fn(prefix + "beta", p.shared_bn[ctx][b].beta);
        }
    }
    for (std::size_t s = 0; s < p.step_specific.size(); ++s) {
        for (std::size_t b = 0; b < p.step_specific[s].size(); ++b) {
            const std::string prefix =
                "step." + std::to_string(s) + ".block." + std::to_string(b) + ".";
            fn(prefix + "fc.w", p.step_specific[s][b].fc_w);
            fn(prefix + "fc.b", p.step_specific[s][b].fc_b);
            fn(prefix + "bn.gamma", p.step_specific[s][b].bn.gamma);
            fn(prefix + "bn.beta", p.step_specific[s][b].bn.beta);
        }
    }
    for (std::size_t s = 0; s < p.attentive.size(); ++s) {
        const std::string prefix = "attn." + std::to_string(s) + ".";
        fn(prefix + "fc.w", p.attentive[s].fc_w);
        fn(prefix + "fc.b", p.attentive[s].fc_b);
        fn(prefix + "bn.gamma", p.attentive[s].bn.gamma);
        fn(prefix + "bn.beta", p.attentive[s].bn.beta);
    }
    fn("head.w", p.head_w);
    fn("head.b", p.head_b);
}

template <typename State, typename Fn>
void slipnet_state_tensors(State& s, const Fn& fn) {
    fn("input_bn.rm", s.input_bn.running_mean);
    fn("input_bn.rv", s.input_bn.running_var);
    for (std::size_t ctx = 0; ctx < s.shared_bn.size(); ++ctx) {
        for (std::size_t b = 0; b < s.shared_bn[ctx].size(); ++b) {
            const std::string prefix =
                "shared_bn." + std::to_string(ctx) + "." + std::to_string(b) + ".";
            fn(prefix + "rm", s.shared_bn[ctx][b].running_mean);
            fn(prefix + "rv", s.shared_bn[ctx][b].running_var);
        }
    }
    for (std::size_t st = 0; st < s.step_specific.size(); ++st) {
        for (std::size_t b = 0; b < s.step_specific[st].size(); ++b) {
            const std::string prefix =
                "step." + std::to_string(st) + ".block." + std::to_string(b) + ".bn.";
            fn(prefix + "rm", s.step_specific[st][b].running_mean);
            fn(prefix + "rv", s.step_specific[st][b].running_var);
        }
    }
    for (std::size_t st = 0; st < s.attentive.size(); ++st) {
        const std::string prefix = "attn." + std::to_string(st) + ".bn.";
        fn(prefix + "rm", s.attentive[st].running_mean);
        fn(prefix + "rv", s.attentive[st].running_var);
    }
}

}  // namespace

void SlipNetParams::for_each_tensor(
    const std::function<void(const std::string&, Matrix&)>& fn) {
    slipnet_params_tensors(*this, fn);
}

void SlipNetParams::for_each_tensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
    slipnet_params_tensors(*this, fn);
}

SlipNetState SlipNetState::init(const SlipNetConfig& config) {
    SlipNetState state;
    const std::size_t glu_dim = 2 * config.hidden_dim();
    state.input_bn = BatchNormStats::identity(config.feature_dim);
    state.shared_bn.resize(config.n_steps + 1);
    for (std::size_t ctx = 0; ctx <= config.n_steps; ++ctx)
        for (std::size_t b = 0; b < config.shared_blocks; ++b)
            state.shared_bn[ctx].push_back(BatchNormStats::identity(glu_dim));
    state.step_specific.resize(config.n_steps);
    for (std::size_t s = 0; s < config.n_steps; ++s)
        for (std::size_t b = 0; b < config.step_blocks; ++b)
            state.step_specific[s].push_back(BatchNormStats::identity(glu_dim));
    for (std::size_t s = 0; s < config.n_steps; ++s)
        state.attentive.push_back(BatchNormStats::identity(config.feature_dim));
    return state;
}

void SlipNetState::for_each_tensor(
    const std::function<void(const std::string&, Matrix&)>& fn) {
    slipnet_state_tensors(*this, fn);
}

void SlipNetState::for_each_tensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
    slipnet_state_tensors(*this, fn);
}

SlipNetOutput slipnet_forward(const SlipNetParams& params, SlipNetState& state,
                              const SlipNetConfig& config, const Matrix& batch, Mode mode,
                              SlipNetForwardCache* cache) {
    config.validate();
    if (batch.cols() != config.feature_dim)
        throw std::invalid_argument("slipnet_forward: expected " +
                                    std::to_string(config.feature_dim) + " features, got " +
                                    batch.shape_str());
    require_finite(batch, "slipnet_forward input");

    const std::size_t n = batch.rows();
    const std::size_t n_d = config.decision_dim;
    const std::size_t n_a = config.attention_dim;

    if (cache) {
        cache->initial_shared.assign(config.shared_blocks, GluBlockCache{});
        cache->steps.assign(config.n_steps, SlipStepCache{});
        for (auto& step : cache->steps) {
            step.shared.assign(config.shared_blocks, GluBlockCache{});
            step.step_blocks.assign(config.step_blocks, GluBlockCache{});
        }
        cache->batch = n;
        cache->consumed = false;
    }

    Matrix x = batchnorm_forward(batch, params.input_bn, state.input_bn, config.bn, mode,
                                 cache ? &cache->input_bn : nullptr);
    if (!x.all_finite())
        throw std::runtime_error("slipnet_forward: non-finite activation in input_bn");
    if (cache) cache->input_normalized = x;

    // Initial pass: the shared transformer's attention slice seeds the masks.
    Matrix h = x;
    for (std::size_t b = 0; b < config.shared_blocks; ++b) {
        h = glu_block_forward(params.shared_fc_w[b], params.shared_fc_b[b],
                              params.shared_bn[0][b], state.shared_bn[0][b], config.bn, h,
                              mode, cache ? &cache->initial_shared[b] : nullptr,
                              "initial shared block " + std::to_string(b));
    }
    Matrix attention = split_right(h, n_a);

    Matrix prior(n, config.feature_dim, 1.0);
    Matrix decision_sum(n, n_d, 0.0);

    SlipNetOutput output;
    output.traces.reserve(config.n_steps);

    for (std::size_t s = 0; s < config.n_steps; ++s) {
        SlipStepCache* step_cache = cache ? &cache->steps[s] : nullptr;
        const std::string step_name = "step " + std::to_string(s);

        Matrix u = fc_forward(attention, params.attentive[s].fc_w, params.attentive[s].fc_b,
                              step_cache ? &step_cache->attn_fc : nullptr);
        u = batchnorm_forward(u, params.attentive[s].bn, state.attentive[s], config.bn, mode,
                              step_cache ? &step_cache->attn_bn : nullptr);
        if (!u.all_finite())
            throw std::runtime_error("slipnet_forward: non-finite activation in " +
                                     step_name + " attentive");

        // z = prior (.) u; exhausted features (prior exactly 0) are excluded
        // from the projection so their mask weight is exactly 0.
        Matrix z = hadamard(prior, u);
        Matrix exhausted(n, config.feature_dim, 0.0);
        bool any_exhausted = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < config.feature_dim; ++j) {
                if (prior(i, j) == 0.0) {
                    exhausted(i, j) = 1.0;
                    any_exhausted = true;
                }
            }
        }
        Matrix mask = sparsemax_rows(z, step_cache ? &step_cache->sparsemax : nullptr,
                                     any_exhausted ? &exhausted : nullptr);

        if (step_cache) {
            step_cache->attn_out = u;
            step_cache->prior = prior;
            step_cache->mask = mask;
        }

        Matrix masked = hadamard(mask, x);
        Matrix hs = masked;
        for (std::size_t b = 0; b < config.shared_blocks; ++b) {
            hs = glu_block_forward(params.shared_fc_w[b], params.shared_fc_b[b],
                                   params.shared_bn[s + 1][b], state.shared_bn[s + 1][b],
                                   config.bn, hs, mode,
                                   step_cache ? &step_cache->shared[b] : nullptr,
                                   step_name + " shared block " + std::to_string(b));
        }
        for (std::size_t b = 0; b < config.step_blocks; ++b) {
            hs = glu_block_forward(params.step_specific[s][b].fc_w,
                                   params.step_specific[s][b].fc_b,
                                   params.step_specific[s][b].bn,
                                   state.step_specific[s][b], config.bn, hs, mode,
                                   step_cache ? &step_cache->step_blocks[b] : nullptr,
                                   step_name + " block " + std::to_string(b));
        }

        Matrix decision = split_left(hs, n_d);
        attention = split_right(hs, n_a);

        Matrix relu_d = relu(decision, step_cache ? &step_cache->relu : nullptr);
        decision_sum += relu_d;

        StepTrace trace;
        trace.mask = std::move(mask);
        trace.prior = prior;
        trace.decision = std::move(decision);
        output.traces.push_back(std::move(trace));

        // P_{i+1} = P_i (.) (gamma - M_i)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < config.feature_dim; ++j)
                prior(i, j) *= config.relaxation - output.traces.back().mask(i, j);
    }

    Matrix logits = fc_forward(decision_sum, params.head_w, params.head_b,
                               cache ? &cache->head : nullptr);
    if (!logits.all_finite())
        throw std::runtime_error("slipnet_forward: non-finite activation in head");
    output.slip_logits = split_left(logits, 2);
    output.crumple_logits = split_right(logits, 2);
    return output;
}

SlipNetParams slipnet_backward(const Matrix& d_slip_logits, const Matrix& d_crumple_logits,
                               SlipNetForwardCache& cache, const SlipNetParams& params,
                               const SlipNetConfig& config) {
    if (cache.consumed)
        throw std::logic_error("slipnet_backward: cache already consumed");
    cache.consumed = true;

    const std::size_t n = cache.batch;
    const std::size_t n_d = config.decision_dim;
    const std::size_t n_a = config.attention_dim;
    require_shape(d_slip_logits, n, 2, "slipnet_backward d_slip");
    require_shape(d_crumple_logits, n, 2, "slipnet_backward d_crumple");

    SlipNetParams grads = SlipNetParams::zeros_like(params);
    const Matrix& x = cache.input_normalized;

    FcGrads head_grads =
        fc_backward(concat_cols(d_slip_logits, d_crumple_logits), cache.head, params.head_w);
    grads.head_w += head_grads.d_weight;
    grads.head_b += head_grads.d_bias;
    const Matrix& d_decision_sum = head_grads.d_input;

    Matrix d_x(n, config.feature_dim, 0.0);
    Matrix d_attention(n, n_a, 0.0);      // into a_i from step i+1
    Matrix d_prior_next;                  // into P_{i+1} from the prior chain

    for (std::size_t s = config.n_steps; s-- > 0;) {
        SlipStepCache& step = cache.steps[s];
        const Matrix& mask = step.mask;
        const Matrix& prior = step.prior;

        // Mask gradient from the prior-scale update P_{s+1} = P_s (.) (g - M_s).
        Matrix d_mask(n, config.feature_dim, 0.0);
        if (!d_prior_next.empty()) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < config.feature_dim; ++j)
                    d_mask(i, j) -= d_prior_next(i, j) * prior(i, j);
        }

        // Step contribution: relu(d_s) summed into the head input.
        Matrix d_decision = relu_backward(d_decision_sum, step.relu);
        Matrix d_h = concat_cols(d_decision, d_attention);

        for (std::size_t b = config.step_blocks; b-- > 0;) {
            d_h = glu_block_backward(d_h, step.step_blocks[b], params.step_specific[s][b].fc_w,
                                     params.step_specific[s][b].bn,
                                     grads.step_specific[s][b].fc_w,
                                     grads.step_specific[s][b].fc_b,
                                     grads.step_specific[s][b].bn);
        }
        for (std::size_t b = config.shared_blocks; b-- > 0;) {
            d_h = glu_block_backward(d_h, step.shared[b], params.shared_fc_w[b],
                                     params.shared_bn[s + 1][b], grads.shared_fc_w[b],
                                     grads.shared_fc_b[b], grads.shared_bn[s + 1][b]);
        }
        // d_h is now the gradient w.r.t. masked = mask (.) x.
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < config.feature_dim; ++j) {
                d_mask(i, j) += d_h(i, j) * x(i, j);
                d_x(i, j) += d_h(i, j) * mask(i, j);
            }
        }

        Matrix d_z = sparsemax_rows_backward(d_mask, step.sparsemax);

        // z = prior (.) u
        Matrix d_prior(n, config.feature_dim, 0.0);
        if (!d_prior_next.empty()) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < config.feature_dim; ++j)
                    d_prior(i, j) =
                        d_prior_next(i, j) * (config.relaxation - mask(i, j));
        }
        Matrix d_u(n, config.feature_dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < config.feature_dim; ++j) {
                d_prior(i, j) += d_z(i, j) * step.attn_out(i, j);
                d_u(i, j) = d_z(i, j) * prior(i, j);
            }
        }

        BatchNormGrads attn_bn_grads =
            batchnorm_backward(d_u, step.attn_bn, params.attentive[s].bn);
        grads.attentive[s].bn.gamma += attn_bn_grads.d_gamma;
        grads.attentive[s].bn.beta += attn_bn_grads.d_beta;
        FcGrads attn_fc_grads =
            fc_backward(attn_bn_grads.d_input, step.attn_fc, params.attentive[s].fc_w);
        grads.attentive[s].fc_w += attn_fc_grads.d_weight;
        grads.attentive[s].fc_b += attn_fc_grads.d_bias;

        d_attention = std::move(attn_fc_grads.d_input);
        d_prior_next = std::move(d_prior);
    }

    // Initial pass: only the attention slice carried gradient.
    Matrix d_h0 = concat_cols(Matrix(n, n_d, 0.0), d_attention);
    for (std::size_t b = config.shared_blocks; b-- > 0;) {
        d_h0 = glu_block_backward(d_h0, cache.initial_shared[b], params.shared_fc_w[b],
                                  params.shared_bn[0][b], grads.shared_fc_w[b],
                                  grads.shared_fc_b[b], grads.shared_bn[0][b]);
    }
    d_x += d_h0;

    BatchNormGrads input_grads = batchnorm_backward(d_x, cache.input_bn, params.input_bn);
    grads.input_bn.gamma += input_grads.d_gamma;
    grads.input_bn.beta += input_grads.d_beta;
    return grads;
}

std::vector<SlipPrediction> slipnet_predict(const SlipNetParams& params, SlipNetState& state,
                                            const SlipNetConfig& config, const Matrix& batch) {
    const SlipNetOutput out = slipnet_forward(params, state, config, batch, Mode::kInfer);
    const Matrix slip_probs = softmax_rows(out.slip_logits);
    const Matrix crumple_probs = softmax_rows(out.crumple_logits);

    std::vector<SlipPrediction> predictions(batch.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        // Argmax with ties resolved to the lowest class index.
        const int slip = slip_probs(i, 1) > slip_probs(i, 0) ? 1 : 0;
        const int crumple = crumple_probs(i, 1) > crumple_probs(i, 0) ? 1 : 0;
        predictions[i].label.slip = static_cast<std::uint8_t>(slip);
        predictions[i].label.crumple = static_cast<std::uint8_t>(crumple);
        predictions[i].slip_confidence = slip_probs(i, slip);
        predictions[i].crumple_confidence = crumple_probs(i, crumple);
    }
    return predictions;
}

std::vector<double> slipnet_explain(const std::vector<StepTrace>& traces) {
    if (traces.empty())
        throw std::invalid_argument("slipnet_explain: empty trace list");
    const std::size_t n = traces.front().mask.rows();
    const std::size_t features = traces.front().mask.cols();

    std::vector<double> attribution(features, 0.0);
    for (const StepTrace& trace : traces) {
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < trace.decision.cols(); ++j)
                eta += std::max(trace.decision(i, j), 0.0);
            for (std::size_t j = 0; j < features; ++j)
                attribution[j] += eta * trace.mask(i, j);
        }
    }
    double total = 0.0;
    for (double v : attribution) total += v;
    if (total <= 0.0)
        return std::vector<double>(features, 1.0 / static_cast<double>(features));
    for (double& v : attribution) v /= total;
    return attribution;
}

}  // namespace gs
