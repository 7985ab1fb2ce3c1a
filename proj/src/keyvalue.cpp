#include "sheetwarden/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sheetwarden {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<KeyValue> parse_key_values(std::string_view text) {
    std::vector<KeyValue> out;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        KeyValue kv{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (kv.key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        out.push_back(std::move(kv));
        if (end == text.size()) break;
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

double parse_double_value(const KeyValue& kv) {
    double v = 0;
    const auto* b = kv.value.data();
    const auto* e = b + kv.value.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || !std::isfinite(v))
        throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' needs a number");
    return v;
}

std::int64_t parse_int_value(const KeyValue& kv) {
    std::int64_t v = 0;
    const auto* b = kv.value.data();
    const auto* e = b + kv.value.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e)
        throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' needs an integer");
    return v;
}

bool parse_bool_value(const KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
    if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
    throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' needs true or false");
}

std::string format_number(double v) {
    if (v == 0) return "0";  // folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace sheetwarden
