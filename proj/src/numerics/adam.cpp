#include "numerics/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gs {

void AdamState::step(const std::vector<Matrix*>& params,
                     const std::vector<const Matrix*>& grads, double lr) {
    if (params.size() != grads.size())
        throw std::invalid_argument("AdamState::step: " + std::to_string(params.size()) +
                                    " params vs " + std::to_string(grads.size()) + " grads");
    if (lr <= 0.0 && lr != 0.0)
        throw std::invalid_argument("AdamState::step: learning rate must be >= 0");

    if (m_.empty()) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const Matrix* p : params) {
            m_.emplace_back(p->rows(), p->cols());
            v_.emplace_back(p->rows(), p->cols());
        }
    }
    if (m_.size() != params.size())
        throw std::invalid_argument("AdamState::step: parameter count changed");

    ++t_;
    const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));

    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = *grads[k];
        require_same_shape(p, g, "AdamState::step grad");
        require_same_shape(p, m_[k], "AdamState::step moment");
        double* pd = p.data();
        const double* gd = g.data();
        double* md = m_[k].data();
        double* vd = v_[k].data();
        for (std::size_t i = 0; i < p.size(); ++i) {
            md[i] = config_.beta1 * md[i] + (1.0 - config_.beta1) * gd[i];
            vd[i] = config_.beta2 * vd[i] + (1.0 - config_.beta2) * gd[i] * gd[i];
            const double m_hat = md[i] / bias1;
            const double v_hat = vd[i] / bias2;
            pd[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

}  // namespace gs
