#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dataio/schema.hpp"
#include "numerics/layers.hpp"
#include "numerics/matrix.hpp"

namespace gs {

// Attentive tabular encoder for the slip/crumple multitask head: per decision
// step, a learned mask (sparsemax of a prior-scaled mapping of the previous
// attention slice) selects features, a stack of shared + step-specific
// FC/BN/GLU blocks transforms them, and the relu'd decision slices are summed
// into the final head.
struct SlipNetConfig {
    std::size_t feature_dim = kSlipFeatureCount;
    std::size_t n_steps = 3;
    std::size_t decision_dim = 32;   // n_d
    std::size_t attention_dim = 32;  // n_a
    std::size_t shared_blocks = 2;
    std::size_t step_blocks = 2;
    double relaxation = 1.3;  // gamma in the prior-scale update
    BatchNormConfig bn;

    std::size_t hidden_dim() const { return decision_dim + attention_dim; }
    void validate() const;
};

struct GluBlockParams {
    Matrix fc_w;
    Matrix fc_b;
    BatchNormParams bn;
};

struct AttentiveParams {
    Matrix fc_w;  // attention_dim x feature_dim
    Matrix fc_b;
    BatchNormParams bn;
};

struct SlipNetParams {
    BatchNormParams input_bn;
    // Shared feature-transformer blocks share their FC mapping across the
    // initial pass and every decision step, but each invocation context keeps
    // its own batch norm (the masked inputs have different statistics).
    std::vector<Matrix> shared_fc_w;                          // per shared block
    std::vector<Matrix> shared_fc_b;
    std::vector<std::vector<BatchNormParams>> shared_bn;      // [context][block]
    std::vector<std::vector<GluBlockParams>> step_specific;   // [step][block]
    std::vector<AttentiveParams> attentive;                   // per step
    Matrix head_w;  // decision_dim x 4 : slip logits then crumple logits
    Matrix head_b;

    static SlipNetParams init(const SlipNetConfig& config, std::uint64_t seed);
    static SlipNetParams zeros_like(const SlipNetParams& other);

    void for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn);
    void for_each_tensor(
        const std::function<void(const std::string&, const Matrix&)>& fn) const;
};

// Batch-norm running statistics; buffers, not learnables.
struct SlipNetState {
    BatchNormStats input_bn;
    std::vector<std::vector<BatchNormStats>> shared_bn;  // [context][block]
    std::vector<std::vector<BatchNormStats>> step_specific;
    std::vector<BatchNormStats> attentive;

    static SlipNetState init(const SlipNetConfig& config);
    void for_each_tensor(const std::function<void(const std::string&, Matrix&)>& fn);
    void for_each_tensor(
        const std::function<void(const std::string&, const Matrix&)>& fn) const;
};

struct StepTrace {
    Matrix mask;      // batch x feature_dim, rows on the simplex
    Matrix prior;     // prior scale the step saw
    Matrix decision;  // pre-relu decision slice
};

struct SlipNetOutput {
    Matrix slip_logits;     // batch x 2
    Matrix crumple_logits;  // batch x 2
    std::vector<StepTrace> traces;
};

struct GluBlockCache {
    FcCache fc;
    BatchNormCache bn;
    GluCache glu;
    bool residual = false;
};

struct SlipStepCache {
    FcCache attn_fc;
    BatchNormCache attn_bn;
    SparsemaxCache sparsemax;
    Matrix attn_out;  // u_i: prior multiplies this
    Matrix prior;     // P_i
    Matrix mask;      // M_i
    std::vector<GluBlockCache> shared;
    std::vector<GluBlockCache> step_blocks;
    ReluCache relu;
};

struct SlipNetForwardCache {
    Matrix input_normalized;  // x-tilde, reused by every masked multiply
    BatchNormCache input_bn;
    std::vector<GluBlockCache> initial_shared;
    std::vector<SlipStepCache> steps;
    FcCache head;
    std::size_t batch = 0;
    bool consumed = false;
};

SlipNetOutput slipnet_forward(const SlipNetParams& params, SlipNetState& state,
                              const SlipNetConfig& config, const Matrix& batch, Mode mode,
                              SlipNetForwardCache* cache = nullptr);

// Accumulates parameter gradients (shared blocks see one contribution per
// invocation) and returns them in a params-shaped container.
SlipNetParams slipnet_backward(const Matrix& d_slip_logits, const Matrix& d_crumple_logits,
                               SlipNetForwardCache& cache, const SlipNetParams& params,
                               const SlipNetConfig& config);

struct SlipPrediction {
    GraspLabel label;
    double slip_confidence = 0.0;
    double crumple_confidence = 0.0;
};

std::vector<SlipPrediction> slipnet_predict(const SlipNetParams& params, SlipNetState& state,
                                            const SlipNetConfig& config, const Matrix& batch);

// Global feature attribution: sum over steps and rows of the step's mask
// weighted by its aggregate relu'd decision output, normalized to sum 1.
std::vector<double> slipnet_explain(const std::vector<StepTrace>& traces);

}  // namespace gs
