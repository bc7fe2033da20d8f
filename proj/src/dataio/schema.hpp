#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gs {

inline constexpr std::size_t kActuatorCount = 16;
inline constexpr std::size_t kShapeClassCount = 13;
inline constexpr std::size_t kSizeClassCount = 3;
// torque[16] + angle[16] + mass (+ encoded shape for the slip task)
inline constexpr std::size_t kShapeFeatureCount = 2 * kActuatorCount + 1;
inline constexpr std::size_t kSlipFeatureCount = kShapeFeatureCount + 1;

// One sample of hand telemetry: the dataset row minus its labels.
struct TelemetryFrame {
    std::uint64_t timestamp_us = 0;
    std::array<double, kActuatorCount> torque{};
    std::array<double, kActuatorCount> angle{};
    double mass = 0.0;
    std::string object_held;
    std::string size_code;
};

struct GraspLabel {
    std::uint8_t slip = 0;
    std::uint8_t crumple = 0;

    bool operator==(const GraspLabel&) const = default;
};

struct Dataset {
    std::vector<TelemetryFrame> frames;
    std::vector<GraspLabel> labels;

    std::size_t size() const { return frames.size(); }
};

// Bijective name <-> index map over exactly 13 shape names. Built either from
// an unordered name set (sorted lexicographically) or from a vocab file whose
// line order is significant.
class ShapeVocab {
public:
    static ShapeVocab from_names(std::vector<std::string> names);
    static ShapeVocab from_file(const std::string& path);
    static ShapeVocab ordered(std::vector<std::string> names);

    void save(const std::string& path) const;

    int index_of(const std::string& name) const;
    const std::string& name_of(int index) const;
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
};

// The three size codes, in the fixed order 5x10x5, R3.5, 5x5x5.
class SizeVocab {
public:
    SizeVocab();
    explicit SizeVocab(std::vector<std::string> codes);

    int index_of(const std::string& code) const;
    const std::string& code_of(int index) const;
    const std::vector<std::string>& codes() const { return codes_; }

private:
    std::vector<std::string> codes_;
};

}  // namespace gs
