#include "sim/objects.hpp"

#include <cmath>
#include <stdexcept>

#include "common/kv.hpp"
#include "common/rng.hpp"

namespace gs {

SimConfig SimConfig::from_kv(const std::map<std::string, std::string>& kv) {
    SimConfig c;
    c.rate_hz = kv_double(kv, "rate_hz", c.rate_hz);
    c.duration_s = kv_double(kv, "duration_s", c.duration_s);
    c.angle_noise_sigma = kv_double(kv, "angle_noise_sigma", c.angle_noise_sigma);
    c.angle_reversion_rate = kv_double(kv, "angle_reversion_rate", c.angle_reversion_rate);
    c.torque_noise_sigma = kv_double(kv, "torque_noise_sigma", c.torque_noise_sigma);
    c.label_noise = kv_double(kv, "label_noise", c.label_noise);
    c.slip_threshold_scale = kv_double(kv, "slip_threshold_scale", c.slip_threshold_scale);
    c.crush_band_scale = kv_double(kv, "crush_band_scale", c.crush_band_scale);
    c.drop_after_s = kv_double(kv, "drop_after_s", c.drop_after_s);
    c.lag_time_constant_s = kv_double(kv, "lag_time_constant_s", c.lag_time_constant_s);
    c.validate();
    return c;
}

void SimConfig::validate() const {
    if (rate_hz <= 0.0) throw std::invalid_argument("SimConfig: rate_hz must be > 0");
    if (duration_s <= 0.0) throw std::invalid_argument("SimConfig: duration_s must be > 0");
    if (angle_noise_sigma < 0.0 || torque_noise_sigma < 0.0)
        throw std::invalid_argument("SimConfig: noise sigmas must be >= 0");
    if (label_noise < 0.0 || label_noise > 1.0)
        throw std::invalid_argument("SimConfig: label_noise must be in [0,1]");
    if (slip_threshold_scale <= 0.0 || crush_band_scale <= 0.0)
        throw std::invalid_argument("SimConfig: threshold scales must be > 0");
    if (drop_after_s <= 0.0 || lag_time_constant_s <= 0.0)
        throw std::invalid_argument("SimConfig: plant time constants must be > 0");
}

const std::vector<std::string>& default_shape_names() {
    static const std::vector<std::string> names = {
        "cube_l",     "cube_m",  "cube_s",  "cuboid_l", "cuboid_m", "cuboid_s",
        "cylinder_m", "rugby_l", "rugby_m", "rugby_s",  "sphere_l", "sphere_m",
        "sphere_s"};
    return names;
}

ShapeVocab default_shape_vocab() { return ShapeVocab::ordered(default_shape_names()); }

namespace {

struct Family {
    double base_mass;
};

Family family_of(const std::string& name) {
    if (name.rfind("cube_", 0) == 0) return {0.40};
    if (name.rfind("cuboid_", 0) == 0) return {0.50};
    if (name.rfind("cylinder_", 0) == 0) return {0.35};
    if (name.rfind("rugby_", 0) == 0) return {0.28};
    if (name.rfind("sphere_", 0) == 0) return {0.32};
    throw std::logic_error("unknown shape family for " + name);
}

// Size suffix -> (mass multiplier, size code). Codes follow the SizeVocab
// order: 0 = 5x10x5 (large), 1 = R3.5 (medium), 2 = 5x5x5 (small).
std::pair<double, int> size_of(const std::string& name) {
    if (name.size() >= 2 && name.compare(name.size() - 2, 2, "_l") == 0) return {1.5, 0};
    if (name.size() >= 2 && name.compare(name.size() - 2, 2, "_m") == 0) return {1.0, 1};
    if (name.size() >= 2 && name.compare(name.size() - 2, 2, "_s") == 0) return {0.6, 2};
    throw std::logic_error("unknown size suffix for " + name);
}

}  // namespace

std::vector<ObjectSpec> object_roster(const SimConfig& config) {
    const auto& names = default_shape_names();
    std::vector<ObjectSpec> roster;
    roster.reserve(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto [mass_mult, size_code] = size_of(names[c]);
        ObjectSpec spec;
        spec.shape_class = static_cast<int>(c);
        spec.size_code = size_code;
        spec.mass = family_of(names[c]).base_mass * mass_mult;
        spec.slip_threshold = config.slip_threshold_scale * (0.8 * spec.mass + 0.05);
        spec.crush_threshold =
            spec.slip_threshold + config.crush_band_scale * (spec.slip_threshold + 0.25);
        // Distinct canonical grasp posture per class; the margin between any
        // two signatures is what makes shapes separable from angles alone.
        Rng rng(mix_seed(0x9a5e, c));
        for (auto& joint : spec.pose_signature) joint = rng.uniform(0.3, 1.3);
        roster.push_back(spec);
    }
    return roster;
}

bool is_fingertip_joint(std::size_t joint) { return joint % 4 == 3; }

double mean_fingertip_torque(const std::array<double, kActuatorCount>& torque) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < torque.size(); ++j) {
        if (is_fingertip_joint(j)) {
            sum += torque[j];
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

GraspLabel label_for_torques(const std::array<double, kActuatorCount>& torque,
                             const ObjectSpec& object) {
    const double grip = mean_fingertip_torque(torque);
    GraspLabel label;
    if (grip < object.slip_threshold)
        label.slip = 1;
    else if (grip > object.crush_threshold)
        label.crumple = 1;
    return label;
}

}  // namespace gs
