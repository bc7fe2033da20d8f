#include "common/kv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gs {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string text(std::istreambuf_iterator<char>(in), {});
    return parse_kv_text(text);
}

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double value = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("config key '" + key + "': non-numeric value '" + s + "'");
    return value;
}

std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

}  // namespace gs
