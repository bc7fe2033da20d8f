#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dataio/schema.hpp"

namespace gs {

// Knobs controlling telemetry difficulty. Threshold scales widen or narrow
// the band between slipping and crumpling; noise sigmas feed the
// Ornstein-Uhlenbeck angle walk and the per-joint torque jitter.
struct SimConfig {
    double rate_hz = 100.0;
    double duration_s = 10.0;
    double angle_noise_sigma = 0.05;
    double angle_reversion_rate = 4.0;
    double torque_noise_sigma = 0.02;
    double label_noise = 0.0;
    double slip_threshold_scale = 1.0;
    double crush_band_scale = 1.0;
    double drop_after_s = 0.5;
    double lag_time_constant_s = 0.05;

    static SimConfig from_kv(const std::map<std::string, std::string>& kv);
    void validate() const;
};

struct ObjectSpec {
    int shape_class = 0;  // index into the default shape vocab
    int size_code = 0;
    double mass = 0.0;
    double slip_threshold = 0.0;   // mean fingertip torque below this slips
    double crush_threshold = 0.0;  // mean fingertip torque above this crumples
    std::array<double, kActuatorCount> pose_signature{};

    double mid_torque() const { return 0.5 * (slip_threshold + crush_threshold); }
};

// The 13 generated shape names in vocab (lexicographic) order.
const std::vector<std::string>& default_shape_names();
ShapeVocab default_shape_vocab();

// One ObjectSpec per shape class, aligned with default_shape_names().
std::vector<ObjectSpec> object_roster(const SimConfig& config);

// Joints 3, 7, 11, 15 are the distal joint of each finger.
bool is_fingertip_joint(std::size_t joint);
double mean_fingertip_torque(const std::array<double, kActuatorCount>& torque);

// The label rule: a pure function of the emitted torques and thresholds.
// Slip and crumple are disjoint because slip_threshold < crush_threshold.
GraspLabel label_for_torques(const std::array<double, kActuatorCount>& torque,
                             const ObjectSpec& object);

}  // namespace gs
