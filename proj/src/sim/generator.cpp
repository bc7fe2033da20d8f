#include "sim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "common/rng.hpp"
#include "sim/telemetry.hpp"

namespace gs {

double OperatorProfile::command_at(double t, double duration) const {
    switch (kind) {
        case Kind::kHold:
            return start_torque;
        case Kind::kRamp:
            return start_torque + (end_torque - start_torque) * (t / duration);
        case Kind::kOvershoot:
        case Kind::kUndershoot:
            return end_torque + (start_torque - end_torque) * std::exp(-t / settle_time_s);
    }
    return start_torque;
}

void OperatorProfile::validate() const {
    if (!(std::isfinite(start_torque) && std::isfinite(end_torque)))
        throw std::invalid_argument("OperatorProfile: torques must be finite");
    if (start_torque < 0.0 || end_torque < 0.0)
        throw std::invalid_argument("OperatorProfile: torques must be >= 0");
    if ((kind == Kind::kOvershoot || kind == Kind::kUndershoot) && settle_time_s <= 0.0)
        throw std::invalid_argument("OperatorProfile: settle time must be > 0");
}

Episode generate_episode(const ObjectSpec& object, const OperatorProfile& profile,
                         const SimConfig& config, std::uint64_t seed) {
    config.validate();
    profile.validate();

    const auto frame_count =
        static_cast<std::size_t>(std::llround(config.duration_s * config.rate_hz));
    if (frame_count == 0)
        throw std::invalid_argument("generate_episode: duration x rate yields no frames");

    Episode episode;
    episode.object = object;
    episode.seed = seed;
    episode.frames.reserve(frame_count);
    episode.labels.reserve(frame_count);

    Rng rng(mix_seed(seed, 0xe915));
    TelemetryEmitter emitter(object, config);
    const double dt = 1.0 / config.rate_hz;

    for (std::size_t i = 0; i < frame_count; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double grip = profile.command_at(t, config.duration_s);
        auto [frame, label] = emitter.emit(t, grip, rng);
        episode.frames.push_back(std::move(frame));
        episode.labels.push_back(label);
    }
    return episode;
}

MixSpec MixSpec::uniform() {
    MixSpec mix;
    mix.weights.assign(kShapeClassCount, 1.0 / static_cast<double>(kShapeClassCount));
    return mix;
}

MixSpec MixSpec::parse(const std::string& text) {
    MixSpec mix;
    mix.weights.assign(kShapeClassCount, 0.0);
    const ShapeVocab vocab = default_shape_vocab();
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string entry = text.substr(start, comma - start);
        const auto colon = entry.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("mix entry '" + entry + "' is not name:weight");
        const std::string name = entry.substr(0, colon);
        const double weight = std::stod(entry.substr(colon + 1));
        mix.weights[static_cast<std::size_t>(vocab.index_of(name))] = weight;
        start = comma + 1;
    }
    mix.validate();
    return mix;
}

void MixSpec::validate() const {
    if (weights.size() != kShapeClassCount)
        throw std::invalid_argument("mix needs one weight per shape class");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mix weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("mix weights sum to " + std::to_string(sum) +
                                    ", expected 1");
}

namespace {

// Largest-remainder allocation of episode counts per class.
std::vector<std::size_t> allocate_counts(std::size_t n, const std::vector<double>& weights) {
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double exact = weights[c] * static_cast<double>(n);
        counts[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i].second];
    return counts;
}

OperatorProfile make_profile(std::size_t index, const ObjectSpec& object, Rng& rng) {
    const double lo = 0.3 * object.slip_threshold;
    const double hi = 1.35 * object.crush_threshold;
    const double mid = object.mid_torque();
    OperatorProfile profile;
    switch (index % 4) {
        case 0:  // ramp up through both thresholds
            profile.kind = OperatorProfile::Kind::kRamp;
            profile.start_torque = lo * rng.uniform(0.8, 1.2);
            profile.end_torque = hi * rng.uniform(0.9, 1.1);
            break;
        case 1:  // too-weak grip settling to mid-band
            profile.kind = OperatorProfile::Kind::kUndershoot;
            profile.start_torque = lo * rng.uniform(0.8, 1.2);
            profile.end_torque = mid * rng.uniform(0.9, 1.1);
            profile.settle_time_s = rng.uniform(0.5, 2.0);
            break;
        case 2:  // ramp down
            profile.kind = OperatorProfile::Kind::kRamp;
            profile.start_torque = hi * rng.uniform(0.9, 1.1);
            profile.end_torque = lo * rng.uniform(0.8, 1.2);
            break;
        default:  // squeezing too hard, then settling
            profile.kind = OperatorProfile::Kind::kOvershoot;
            profile.start_torque = hi * rng.uniform(0.9, 1.1);
            profile.end_torque = mid * rng.uniform(0.9, 1.1);
            profile.settle_time_s = rng.uniform(0.5, 2.0);
            break;
    }
    return profile;
}

}  // namespace

Dataset generate_dataset(std::size_t n_episodes, const MixSpec& mix, const SimConfig& config,
                         std::uint64_t seed) {
    if (n_episodes == 0)
        throw std::invalid_argument("generate_dataset: need at least one episode");
    mix.validate();
    config.validate();

    const auto roster = object_roster(config);
    const auto counts = allocate_counts(n_episodes, mix.weights);

    std::vector<int> classes;
    classes.reserve(n_episodes);
    for (std::size_t c = 0; c < counts.size(); ++c)
        classes.insert(classes.end(), counts[c], static_cast<int>(c));

    Rng master(mix_seed(seed, 0xda7a));
    master.shuffle(classes);

    Dataset dataset;
    for (std::size_t e = 0; e < classes.size(); ++e) {
        const ObjectSpec& object = roster[static_cast<std::size_t>(classes[e])];
        const OperatorProfile profile = make_profile(e, object, master);
        Episode episode = generate_episode(object, profile, config, mix_seed(seed, e));
        dataset.frames.insert(dataset.frames.end(),
                              std::make_move_iterator(episode.frames.begin()),
                              std::make_move_iterator(episode.frames.end()));
        dataset.labels.insert(dataset.labels.end(), episode.labels.begin(),
                              episode.labels.end());
    }
    return dataset;
}

}  // namespace gs
