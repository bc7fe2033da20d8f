#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataio/schema.hpp"
#include "sim/objects.hpp"

namespace gs {

// Commanded grip torque over one grasp episode.
struct OperatorProfile {
    enum class Kind { kHold, kRamp, kOvershoot, kUndershoot };
    Kind kind = Kind::kHold;
    double start_torque = 0.0;
    double end_torque = 0.0;
    double settle_time_s = 0.8;  // exponential profiles only

    double command_at(double t, double duration) const;
    void validate() const;
};

struct Episode {
    ObjectSpec object;
    std::vector<TelemetryFrame> frames;
    std::vector<GraspLabel> labels;
    std::uint64_t seed = 0;
};

// Open-loop telemetry: angles follow a per-joint Ornstein-Uhlenbeck walk
// around the object's pose signature, fingertip joints carry the commanded
// grip torque plus jitter, labels come from the emitted torques.
Episode generate_episode(const ObjectSpec& object, const OperatorProfile& profile,
                         const SimConfig& config, std::uint64_t seed);

// Episode share per shape class; weights must sum to 1.
struct MixSpec {
    std::vector<double> weights;  // size 13, aligned with default_shape_names()

    static MixSpec uniform();
    // "sphere_m:0.5,cube_s:0.5"
    static MixSpec parse(const std::string& text);
    void validate() const;
};

// Deterministic under (seed, config): episode counts per class are allocated
// by largest remainder, so the class balance error is below one episode.
Dataset generate_dataset(std::size_t n_episodes, const MixSpec& mix, const SimConfig& config,
                         std::uint64_t seed);

}  // namespace gs
