#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sheetwarden {

inline constexpr int kMaxRows = 10000;
inline constexpr int kMaxCols = 1000;

/// Row-major position inside one sheet (1-based).
struct GridPos {
    int row = 1;
    int col = 1;

    friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

/// Fully qualified cell address. Orders by (sheet, row, col).
struct CellAddress {
    std::string sheet;
    int col = 1;
    int row = 1;

    GridPos pos() const { return {row, col}; }

    friend bool operator==(const CellAddress&, const CellAddress&) = default;
    friend std::strong_ordering operator<=>(const CellAddress& a, const CellAddress& b) {
        if (auto c = a.sheet <=> b.sheet; c != 0) return c;
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.col <=> b.col;
    }
};

std::string column_letters(int col);
std::optional<int> column_index(std::string_view letters);

/// "C7" for (col 3, row 7).
std::string a1(int col, int row);
inline std::string a1(GridPos p) { return a1(p.col, p.row); }

/// "Sheet!C7".
std::string to_string(const CellAddress& addr);

/// Parses a bare "C7" style reference; rejects anything outside the addressable grid.
std::optional<GridPos> parse_a1(std::string_view text);

/// True if the sheet name can appear unquoted before '!' in a formula.
bool is_plain_sheet_name(std::string_view name);

}  // namespace sheetwarden
