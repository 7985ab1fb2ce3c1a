#include "sheetwarden/workbook.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace sheetwarden {

namespace {

constexpr std::array<std::string_view, 7> kImportanceLabels = {
    "Not important", "Little importance", "Some importance", "Moderate importance",
    "Important",     "Very important",    "Don't Know",
};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

std::string_view to_string(Importance i) { return kImportanceLabels[static_cast<std::size_t>(i)]; }

std::optional<Importance> parse_importance(std::string_view label) {
    for (std::size_t i = 0; i < kImportanceLabels.size(); ++i)
        if (iequals(label, kImportanceLabels[i])) return static_cast<Importance>(i);
    return std::nullopt;
}

const Sheet* Workbook::find_sheet(std::string_view sheet_name) const {
    for (const auto& s : sheets)
        if (s.name == sheet_name) return &s;
    return nullptr;
}

Sheet* Workbook::find_sheet(std::string_view sheet_name) {
    for (auto& s : sheets)
        if (s.name == sheet_name) return &s;
    return nullptr;
}

const Cell* Workbook::find_cell(const CellAddress& addr) const {
    const auto* sheet = find_sheet(addr.sheet);
    return sheet ? sheet->find(addr.pos()) : nullptr;
}

bool Workbook::has_annotation(const CellAddress& addr) const {
    return std::any_of(annotations.begin(), annotations.end(),
                       [&](const Annotation& a) { return a.address == addr; });
}

}  // namespace sheetwarden
