#include "dataio/schema.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace gs {

namespace {

void require_thirteen(const std::vector<std::string>& names, const std::string& origin) {
    if (names.size() != kShapeClassCount)
        throw std::invalid_argument("shape vocab from " + origin + " has " +
                                    std::to_string(names.size()) + " names, expected " +
                                    std::to_string(kShapeClassCount));
    for (std::size_t i = 0; i + 1 < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                throw std::invalid_argument("shape vocab from " + origin +
                                            " repeats name '" + names[i] + "'");
}

}  // namespace

ShapeVocab ShapeVocab::from_names(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    require_thirteen(names, "name list");
    ShapeVocab vocab;
    vocab.names_ = std::move(names);
    return vocab;
}

ShapeVocab ShapeVocab::ordered(std::vector<std::string> names) {
    require_thirteen(names, "ordered list");
    ShapeVocab vocab;
    vocab.names_ = std::move(names);
    return vocab;
}

ShapeVocab ShapeVocab::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocab file " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    require_thirteen(names, path);
    ShapeVocab vocab;
    vocab.names_ = std::move(names);
    return vocab;
}

void ShapeVocab::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write vocab file " + path);
    for (const auto& name : names_) out << name << '\n';
}

int ShapeVocab::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown shape name '" + name + "'");
}

const std::string& ShapeVocab::name_of(int index) const {
    if (index < 0 || static_cast<std::size_t>(index) >= names_.size())
        throw std::invalid_argument("shape index " + std::to_string(index) + " out of range");
    return names_[static_cast<std::size_t>(index)];
}

SizeVocab::SizeVocab() : codes_{"5x10x5", "R3.5", "5x5x5"} {}

SizeVocab::SizeVocab(std::vector<std::string> codes) : codes_(std::move(codes)) {
    if (codes_.size() != kSizeClassCount)
        throw std::invalid_argument("size vocab needs exactly " +
                                    std::to_string(kSizeClassCount) + " codes");
}

int SizeVocab::index_of(const std::string& code) const {
    for (std::size_t i = 0; i < codes_.size(); ++i)
        if (codes_[i] == code) return static_cast<int>(i);
    throw std::invalid_argument("unknown size code '" + code + "'");
}

const std::string& SizeVocab::code_of(int index) const {
    if (index < 0 || static_cast<std::size_t>(index) >= codes_.size())
        throw std::invalid_argument("size index " + std::to_string(index) + " out of range");
    return codes_[static_cast<std::size_t>(index)];
}

}  // namespace gs
