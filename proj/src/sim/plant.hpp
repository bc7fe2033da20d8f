#pragma once

#include <cstdint>

#include "sim/objects.hpp"
#include "sim/telemetry.hpp"

namespace gs {

// Closed-loop grasp plant. The actual grip torque tracks the command through
// a first-order lag; an object held below its slip threshold for more than
// drop_after_s consecutive seconds is dropped, which is absorbing.
class Plant {
public:
    struct StepResult {
        TelemetryFrame frame;
        GraspLabel label;
        bool dropped = false;  // set on the step that loses the object
    };

    Plant(const ObjectSpec& object, const SimConfig& config, std::uint64_t seed,
          double initial_torque = 0.0);

    // Throws std::logic_error when stepping a dropped plant.
    StepResult step(double grip_command, double dt);

    bool dropped() const { return dropped_; }
    double actual_torque() const { return actual_torque_; }
    double time_s() const { return time_s_; }
    const ObjectSpec& object() const { return object_; }

private:
    ObjectSpec object_;
    SimConfig config_;
    TelemetryEmitter emitter_;
    Rng rng_;
    double actual_torque_ = 0.0;
    double time_s_ = 0.0;
    double slip_run_s_ = 0.0;
    bool dropped_ = false;
};

}  // namespace gs
