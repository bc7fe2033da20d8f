#include "dataio/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace gs {

namespace {

std::string build_header() {
    std::string h = "timestamp_us";
    for (std::size_t i = 0; i < kActuatorCount; ++i) h += ",torque_" + std::to_string(i);
    for (std::size_t i = 0; i < kActuatorCount; ++i) h += ",angle_" + std::to_string(i);
    h += ",mass_kg,object_held,size_code,slip,crumple";
    return h;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line,
                              const std::string& what) {
    throw std::runtime_error(path + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double_field(std::string_view field, const std::string& path, std::size_t line,
                          const char* column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        parse_error(path, line, std::string("non-numeric value '") + std::string(field) +
                                    "' in column " + column);
    if (!std::isfinite(value))
        parse_error(path, line, std::string("non-finite value in column ") + column);
    return value;
}

std::uint64_t parse_u64_field(std::string_view field, const std::string& path,
                              std::size_t line, const char* column) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        parse_error(path, line, std::string("non-numeric value '") + std::string(field) +
                                    "' in column " + column);
    return value;
}

std::uint8_t parse_flag_field(std::string_view field, const std::string& path,
                              std::size_t line, const char* column) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    parse_error(path, line,
                std::string("flag column ") + column + " must be 0 or 1, got '" +
                    std::string(field) + "'");
}

}  // namespace

const std::string& dataset_header() {
    static const std::string header = build_header();
    return header;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file " + path);

    const std::size_t expected_fields = 1 + 2 * kActuatorCount + 1 + 2 + 2;

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty file, expected the dataset header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != dataset_header())
        throw std::runtime_error(path + ": line 1: header does not match the dataset schema");

    Dataset dataset;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != expected_fields)
            parse_error(path, line_no,
                        "expected " + std::to_string(expected_fields) + " columns, got " +
                            std::to_string(fields.size()));

        TelemetryFrame frame;
        std::size_t f = 0;
        frame.timestamp_us = parse_u64_field(fields[f++], path, line_no, "timestamp_us");
        for (std::size_t i = 0; i < kActuatorCount; ++i)
            frame.torque[i] = parse_double_field(fields[f++], path, line_no, "torque");
        for (std::size_t i = 0; i < kActuatorCount; ++i)
            frame.angle[i] = parse_double_field(fields[f++], path, line_no, "angle");
        frame.mass = parse_double_field(fields[f++], path, line_no, "mass_kg");
        if (frame.mass <= 0.0) parse_error(path, line_no, "mass_kg must be > 0");
        frame.object_held = std::string(fields[f++]);
        frame.size_code = std::string(fields[f++]);

        GraspLabel label;
        label.slip = parse_flag_field(fields[f++], path, line_no, "slip");
        label.crumple = parse_flag_field(fields[f++], path, line_no, "crumple");

        dataset.frames.push_back(std::move(frame));
        dataset.labels.push_back(label);
    }
    return dataset;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_dataset(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset file " + path);
    out << dataset_header() << '\n';
    std::string row;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const TelemetryFrame& frame = dataset.frames[i];
        const GraspLabel& label = dataset.labels[i];
        row.clear();
        row += std::to_string(frame.timestamp_us);
        for (double v : frame.torque) {
            row += ',';
            row += format_double(v);
        }
        for (double v : frame.angle) {
            row += ',';
            row += format_double(v);
        }
        row += ',';
        row += format_double(frame.mass);
        row += ',';
        row += frame.object_held;
        row += ',';
        row += frame.size_code;
        row += ',';
        row += label.slip ? '1' : '0';
        row += ',';
        row += label.crumple ? '1' : '0';
        row += '\n';
        out << row;
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace gs
