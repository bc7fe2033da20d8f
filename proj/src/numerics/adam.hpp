#pragma once

#include <cstdint>
#include <vector>

#include "numerics/matrix.hpp"

namespace gs {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction over a fixed-order list of parameter tensors.
// Moment buffers are allocated on the first step and must keep their shapes
// afterwards.
class AdamState {
public:
    explicit AdamState(AdamConfig config = {}) : config_(config) {}

    void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
              double lr);

    std::uint64_t step_count() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    std::uint64_t t_ = 0;
};

}  // namespace gs
