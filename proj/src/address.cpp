#include "sheetwarden/address.hpp"

#include <cctype>

namespace sheetwarden {

std::string column_letters(int col) {
    std::string out;
    while (col > 0) {
        const int rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::optional<int> column_index(std::string_view letters) {
    if (letters.empty() || letters.size() > 3) return std::nullopt;
    int col = 0;
    for (char ch : letters) {
        const auto c = static_cast<unsigned char>(ch);
        if (!std::isalpha(c)) return std::nullopt;
        col = col * 26 + (std::toupper(c) - 'A' + 1);
    }
    if (col > kMaxCols) return std::nullopt;
    return col;
}

std::string a1(int col, int row) { return column_letters(col) + std::to_string(row); }

std::string to_string(const CellAddress& addr) { return addr.sheet + "!" + a1(addr.col, addr.row); }

std::optional<GridPos> parse_a1(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    const auto col = column_index(text.substr(0, i));
    if (!col) return std::nullopt;
    const auto digits = text.substr(i);
    if (digits.empty() || digits.size() > 5 || digits[0] == '0') return std::nullopt;
    int row = 0;
    for (char ch : digits) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
        row = row * 10 + (ch - '0');
    }
    if (row > kMaxRows) return std::nullopt;
    return GridPos{row, *col};
}

bool is_plain_sheet_name(std::string_view name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
    for (char ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    // Names that also read as a cell reference ("AB12") must be quoted.
    return !parse_a1(name).has_value();
}

}  // namespace sheetwarden
