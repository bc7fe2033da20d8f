#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "dataio/csv.hpp"
#include "sim/generator.hpp"
#include "sim/objects.hpp"
#include "sim/plant.hpp"

using namespace gs;

namespace {

SimConfig quiet_config() {
    SimConfig config;
    config.angle_noise_sigma = 0.0;
    config.torque_noise_sigma = 0.0;
    return config;
}

OperatorProfile hold_at(double torque) {
    OperatorProfile profile;
    profile.kind = OperatorProfile::Kind::kHold;
    profile.start_torque = torque;
    return profile;
}

}  // namespace

TEST_CASE("object roster invariants") {
    const auto roster = object_roster(SimConfig{});
    REQUIRE(roster.size() == kShapeClassCount);
    for (const auto& object : roster) {
        CHECK(object.mass > 0.0);
        CHECK(object.slip_threshold > 0.0);
        CHECK(object.slip_threshold < object.crush_threshold);
    }
    // Pairwise pose-signature margin underwrites shape separability.
    for (std::size_t a = 0; a < roster.size(); ++a) {
        for (std::size_t b = a + 1; b < roster.size(); ++b) {
            double dist2 = 0.0;
            for (std::size_t j = 0; j < kActuatorCount; ++j) {
                const double d = roster[a].pose_signature[j] - roster[b].pose_signature[j];
                dist2 += d * d;
            }
            CHECK(std::sqrt(dist2) >= 0.3);
        }
    }
}

TEST_CASE("label rule bands") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[0];
    std::array<double, kActuatorCount> torque{};

    auto set_grip = [&](double grip) {
        for (std::size_t j = 0; j < kActuatorCount; ++j)
            torque[j] = is_fingertip_joint(j) ? grip : 0.1;
    };

    set_grip(object.mid_torque());
    CHECK(label_for_torques(torque, object) == GraspLabel{0, 0});
    set_grip(0.5 * object.slip_threshold);
    CHECK(label_for_torques(torque, object) == GraspLabel{1, 0});
    set_grip(1.5 * object.crush_threshold);
    CHECK(label_for_torques(torque, object) == GraspLabel{0, 1});
}

TEST_CASE("episode at mid-band torque is all quiet") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[4];
    const Episode episode =
        generate_episode(object, hold_at(object.mid_torque()), quiet_config(), 7);
    REQUIRE(episode.frames.size() == 1000);
    for (const auto& label : episode.labels) CHECK(label == GraspLabel{0, 0});
}

TEST_CASE("episode below the slip threshold slips everywhere") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[4];
    const Episode episode =
        generate_episode(object, hold_at(0.5 * object.slip_threshold), quiet_config(), 7);
    for (const auto& label : episode.labels) CHECK(label == GraspLabel{1, 0});
}

TEST_CASE("ramp crossing flips the label within one frame of the analytic time") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[2];
    const SimConfig config = quiet_config();

    OperatorProfile ramp;
    ramp.kind = OperatorProfile::Kind::kRamp;
    ramp.start_torque = 0.25 * object.slip_threshold;
    ramp.end_torque = object.mid_torque();
    // command(t) = start + (end-start) * t/T crosses slip_threshold at t*.
    const double t_star = config.duration_s * (object.slip_threshold - ramp.start_torque) /
                          (ramp.end_torque - ramp.start_torque);

    const Episode episode = generate_episode(object, ramp, config, 11);
    const double dt = 1.0 / config.rate_hz;
    std::size_t first_ok = episode.labels.size();
    for (std::size_t i = 0; i < episode.labels.size(); ++i) {
        if (episode.labels[i].slip == 0) {
            first_ok = i;
            break;
        }
    }
    REQUIRE(first_ok < episode.labels.size());
    const double flip_time = static_cast<double>(first_ok) * dt;
    CHECK(std::abs(flip_time - t_star) <= dt + 1e-12);
    for (std::size_t i = first_ok; i < episode.labels.size(); ++i)
        CHECK(episode.labels[i].slip == 0);
}

TEST_CASE("stored labels re-derive from emitted frames") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[9];
    SimConfig config;  // default noise on
    config.duration_s = 2.0;

    OperatorProfile ramp;
    ramp.kind = OperatorProfile::Kind::kRamp;
    ramp.start_torque = 0.3 * object.slip_threshold;
    ramp.end_torque = 1.35 * object.crush_threshold;

    const Episode episode = generate_episode(object, ramp, config, 3);
    for (std::size_t i = 0; i < episode.frames.size(); ++i)
        CHECK(label_for_torques(episode.frames[i].torque, object) == episode.labels[i]);
}

TEST_CASE("episode timestamps strictly increase and labels align") {
    const auto roster = object_roster(SimConfig{});
    SimConfig config;
    config.duration_s = 1.0;
    const Episode episode = generate_episode(roster[0], hold_at(0.4), config, 5);
    CHECK(episode.frames.size() == episode.labels.size());
    for (std::size_t i = 1; i < episode.frames.size(); ++i)
        CHECK(episode.frames[i].timestamp_us > episode.frames[i - 1].timestamp_us);
}

TEST_CASE("mix parsing and validation") {
    const MixSpec uniform = MixSpec::uniform();
    CHECK(uniform.weights.size() == 13);

    const MixSpec single = MixSpec::parse("sphere_m:1.0");
    CHECK(single.weights[11] == 1.0);

    CHECK_THROWS_WITH(static_cast<void>(MixSpec::parse("sphere_m:0.5")),
                      doctest::Contains("sum"));
    CHECK_THROWS(static_cast<void>(MixSpec::parse("pyramid19:1.0")));
}

TEST_CASE("dataset generation") {
    SimConfig config;
    config.duration_s = 0.1;  // 10 frames per episode keeps this fast

    SUBCASE("uniform mix with a multiple of 13 episodes is exactly balanced") {
        const Dataset dataset = generate_dataset(26, MixSpec::uniform(), config, 42);
        CHECK(dataset.size() == 26 * 10);
        std::map<std::string, int> counts;
        for (const auto& frame : dataset.frames) counts[frame.object_held]++;
        CHECK(counts.size() == 13);
        for (const auto& [name, count] : counts) CHECK(count == 20);
    }
    SUBCASE("single-class mix") {
        const Dataset dataset = generate_dataset(3, MixSpec::parse("cube_s:1.0"), config, 42);
        for (const auto& frame : dataset.frames) CHECK(frame.object_held == "cube_s");
    }
    SUBCASE("same seed gives byte-identical csv") {
        const char* path_a = "/tmp/gs_test_gen_a.csv";
        const char* path_b = "/tmp/gs_test_gen_b.csv";
        write_dataset(path_a, generate_dataset(5, MixSpec::uniform(), config, 99));
        write_dataset(path_b, generate_dataset(5, MixSpec::uniform(), config, 99));
        std::ifstream a(path_a, std::ios::binary), b(path_b, std::ios::binary);
        const std::string bytes_a(std::istreambuf_iterator<char>(a), {});
        const std::string bytes_b(std::istreambuf_iterator<char>(b), {});
        CHECK(bytes_a == bytes_b);
        CHECK(!bytes_a.empty());
        std::remove(path_a);
        std::remove(path_b);
    }
    SUBCASE("generated csv round-trips byte-for-byte through load/write") {
        const char* path_a = "/tmp/gs_test_gen_rt1.csv";
        const char* path_b = "/tmp/gs_test_gen_rt2.csv";
        write_dataset(path_a, generate_dataset(3, MixSpec::uniform(), config, 5));
        write_dataset(path_b, load_dataset(path_a));
        std::ifstream a(path_a, std::ios::binary), b(path_b, std::ios::binary);
        const std::string bytes_a(std::istreambuf_iterator<char>(a), {});
        const std::string bytes_b(std::istreambuf_iterator<char>(b), {});
        CHECK(bytes_a == bytes_b);
        std::remove(path_a);
        std::remove(path_b);
    }
}

TEST_CASE("plant lag follows the closed-form exponential") {
    const auto roster = object_roster(SimConfig{});
    SimConfig config = quiet_config();
    const double tau = config.lag_time_constant_s;
    const double t0 = 0.2, cmd = 0.8;

    Plant plant(roster[0], config, 1, t0);
    // One step of size tau: torque = cmd + (t0 - cmd) e^(-1).
    plant.step(cmd, tau);
    const double expected = cmd + (t0 - cmd) * std::exp(-1.0);
    CHECK(plant.actual_torque() == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("plant holding the command is a fixed point") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[3];
    Plant plant(object, quiet_config(), 1, object.mid_torque());
    for (int i = 0; i < 20; ++i) {
        plant.step(object.mid_torque(), 0.01);
        CHECK(plant.actual_torque() == doctest::Approx(object.mid_torque()).epsilon(1e-12));
    }
}

TEST_CASE("plant drops after sustained slip and refuses further steps") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[3];
    SimConfig config = quiet_config();

    Plant plant(object, config, 1, 0.0);
    std::size_t steps = 0;
    while (!plant.dropped()) {
        const auto result = plant.step(0.0, 0.01);
        ++steps;
        CHECK(result.label.slip == 1);
        REQUIRE(steps < 200);
    }
    // T_drop = 0.5 s at 10 ms ticks: dropped within one tick of 0.5 s
    // (accumulated dt sits on the threshold to rounding).
    CHECK(steps >= 50);
    CHECK(steps <= 51);
    CHECK_THROWS_AS(static_cast<void>(plant.step(0.0, 0.01)), std::logic_error);
}

TEST_CASE("plant label matches the pure rule on emitted torques") {
    const auto roster = object_roster(SimConfig{});
    const ObjectSpec& object = roster[7];
    SimConfig config;  // noisy
    Plant plant(object, config, 123, object.mid_torque());
    for (int i = 0; i < 100 && !plant.dropped(); ++i) {
        const auto result = plant.step(object.mid_torque(), 0.01);
        CHECK(label_for_torques(result.frame.torque, object) == result.label);
    }
}
