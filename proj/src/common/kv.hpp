#pragma once

#include <map>
#include <string>

namespace gs {

// key=value text, one pair per line; '#' starts a comment; blank lines skipped.
std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::map<std::string, std::string> parse_kv_file(const std::string& path);

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback);
std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& fallback);

}  // namespace gs
