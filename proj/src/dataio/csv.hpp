#pragma once

#include <string>

#include "dataio/schema.hpp"

namespace gs {

// Canonical dataset header:
// timestamp_us,torque_0..torque_15,angle_0..angle_15,mass_kg,object_held,size_code,slip,crumple
const std::string& dataset_header();

// Parses a dataset CSV. Malformed rows raise std::runtime_error naming the
// 1-based line (the header is line 1). A header-only file is an empty
// dataset, not an error.
Dataset load_dataset(const std::string& path);

// Writes a dataset with canonical formatting: floats as shortest
// round-trip decimals, '\n' line endings.
void write_dataset(const std::string& path, const Dataset& dataset);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace gs
