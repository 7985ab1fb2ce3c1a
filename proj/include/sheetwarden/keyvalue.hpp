#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sheetwarden {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One `key = value` pair with the 1-based line it came from.
struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

/// Parses `key=value` lines. Blank lines and lines starting with '#' are skipped;
/// whitespace around key and value is trimmed.
std::vector<KeyValue> parse_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

double parse_double_value(const KeyValue& kv);
std::int64_t parse_int_value(const KeyValue& kv);
bool parse_bool_value(const KeyValue& kv);

std::string_view trim(std::string_view s);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace sheetwarden
