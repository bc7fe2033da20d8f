#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "numerics/matrix.hpp"

namespace gs {

// GSNV1 container: magic "GSNV1", a key=value config text section, a table of
// (name, dtype, shape, offset) entries, then raw little-endian tensor data.
// Tensors may be stored as f64 (exact) or f32 (compact; values round-trip
// within ~1e-7 relative).

enum class CheckpointDtype : std::uint8_t { kF64 = 0, kF32 = 1 };

struct Checkpoint {
    std::vector<std::pair<std::string, std::string>> config;  // ordered key=value
    std::vector<std::pair<std::string, Matrix>> tensors;      // ordered by name of record

    const std::string& config_value(const std::string& key) const;
    bool has_config(const std::string& key) const;
    const Matrix& tensor(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint,
                     CheckpointDtype dtype = CheckpointDtype::kF64);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gs
