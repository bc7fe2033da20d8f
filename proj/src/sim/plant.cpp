#include "sim/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace gs {

Plant::Plant(const ObjectSpec& object, const SimConfig& config, std::uint64_t seed,
             double initial_torque)
    : object_(object),
      config_(config),
      emitter_(object, config),
      rng_(mix_seed(seed, 0x91a7)),
      actual_torque_(initial_torque) {
    config_.validate();
}

Plant::StepResult Plant::step(double grip_command, double dt) {
    if (dropped_)
        throw std::logic_error("Plant::step: object already dropped at t=" +
                               std::to_string(time_s_) + "s");
    if (dt <= 0.0) throw std::invalid_argument("Plant::step: dt must be > 0");

    // Exact first-order lag: torque(t+dt) = cmd + (torque(t) - cmd) e^(-dt/tau).
    actual_torque_ = grip_command +
                     (actual_torque_ - grip_command) * std::exp(-dt / config_.lag_time_constant_s);
    time_s_ += dt;

    StepResult result;
    auto [frame, label] = emitter_.emit(time_s_, actual_torque_, rng_);
    result.frame = std::move(frame);
    result.label = label;

    if (label.slip)
        slip_run_s_ += dt;
    else
        slip_run_s_ = 0.0;
    if (slip_run_s_ > config_.drop_after_s) {
        dropped_ = true;
        result.dropped = true;
    }
    return result;
}

}  // namespace gs
