#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "common/rng.hpp"
#include "dataio/schema.hpp"
#include "sim/objects.hpp"

namespace gs {

// Shared frame emission for the open-loop generator and the closed-loop
// plant: OU angle walk around the pose signature, grip torque on fingertip
// joints, half grip on the proximal joints, jitter everywhere. Labels are
// derived from the emitted torques so they stay a pure function of the frame.
class TelemetryEmitter {
public:
    TelemetryEmitter(const ObjectSpec& object, const SimConfig& config)
        : object_(object),
          config_(config),
          angles_(object.pose_signature),
          shape_name_(default_shape_vocab().name_of(object.shape_class)),
          size_code_(SizeVocab().code_of(object.size_code)) {}

    std::pair<TelemetryFrame, GraspLabel> emit(double t_seconds, double grip_torque,
                                               Rng& rng) {
        const double dt = 1.0 / config_.rate_hz;
        const double sqrt_dt = std::sqrt(dt);

        TelemetryFrame frame;
        frame.timestamp_us = static_cast<std::uint64_t>(std::llround(t_seconds * 1e6));
        for (std::size_t j = 0; j < kActuatorCount; ++j) {
            angles_[j] += config_.angle_reversion_rate *
                              (object_.pose_signature[j] - angles_[j]) * dt +
                          config_.angle_noise_sigma * sqrt_dt * rng.normal();
            frame.angle[j] = angles_[j];
        }
        for (std::size_t j = 0; j < kActuatorCount; ++j) {
            const double base = is_fingertip_joint(j) ? grip_torque : 0.5 * grip_torque;
            frame.torque[j] = base + config_.torque_noise_sigma * rng.normal();
        }
        frame.mass = object_.mass;
        frame.object_held = shape_name_;
        frame.size_code = size_code_;

        GraspLabel label = label_for_torques(frame.torque, object_);
        if (config_.label_noise > 0.0) {
            if (rng.uniform() < config_.label_noise) label.slip ^= 1;
            if (rng.uniform() < config_.label_noise) label.crumple ^= 1;
        }
        return {std::move(frame), label};
    }

private:
    ObjectSpec object_;
    SimConfig config_;
    std::array<double, kActuatorCount> angles_;
    std::string shape_name_;
    std::string size_code_;
};

}  // namespace gs
