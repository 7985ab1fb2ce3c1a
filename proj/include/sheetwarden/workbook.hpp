#pragma once

#include "sheetwarden/address.hpp"
#include "sheetwarden/formula.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sheetwarden {

/// A formula keeps its exact source text next to the parsed tree.
struct Formula {
    std::string source;
    ExprPtr ast;

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.source == b.source && same_ast(a.ast, b.ast);
    }
};

using CellContent = std::variant<std::monostate, double, std::string, Formula>;

struct Cell {
    CellContent content;
    bool hidden = false;

    bool empty() const { return std::holds_alternative<std::monostate>(content); }
    const Formula* formula() const { return std::get_if<Formula>(&content); }

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Sheet {
    std::string name;
    std::map<GridPos, Cell> cells;
    std::set<int> hidden_rows;
    std::set<int> hidden_cols;

    const Cell* find(GridPos p) const {
        auto it = cells.find(p);
        return it == cells.end() ? nullptr : &it->second;
    }

    friend bool operator==(const Sheet&, const Sheet&) = default;
};

/// Macro bodies are opaque; only name and line count matter to the analyzers.
struct Macro {
    std::string name;
    std::vector<std::string> body;

    friend bool operator==(const Macro&, const Macro&) = default;
};

/// Answers to "How important are the spreadsheets you develop?".
enum class Importance {
    NotImportant,
    LittleImportance,
    SomeImportance,
    ModerateImportance,
    Important,
    VeryImportant,
    DontKnow,
};

std::string_view to_string(Importance i);
std::optional<Importance> parse_importance(std::string_view label);

struct Metadata {
    std::optional<Importance> importance;
    std::optional<bool> methodology;
    std::optional<std::string> owner;

    bool methodology_declared() const { return methodology.value_or(false); }

    friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// Comment record attached to a cell without touching its content.
struct Annotation {
    CellAddress address;
    std::string text;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Workbook {
    std::string name;
    std::vector<Sheet> sheets;
    std::vector<Macro> macros;
    Metadata metadata;
    std::vector<Annotation> annotations;

    const Sheet* find_sheet(std::string_view sheet_name) const;
    Sheet* find_sheet(std::string_view sheet_name);
    const Cell* find_cell(const CellAddress& addr) const;
    bool has_annotation(const CellAddress& addr) const;

    friend bool operator==(const Workbook&, const Workbook&) = default;
};

/// Calls fn(const CellAddress&, const Cell&) for every stored cell in (sheet order, row, col).
template <class F>
void for_each_cell(const Workbook& wb, F&& fn) {
    for (const auto& sheet : wb.sheets)
        for (const auto& [pos, cell] : sheet.cells) fn(CellAddress{sheet.name, pos.col, pos.row}, cell);
}

}  // namespace sheetwarden
