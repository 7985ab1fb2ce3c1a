#pragma once

#include "sheetwarden/workbook.hpp"

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetwarden {

enum class ParseErrorKind { MalformedLine, DuplicateCell, DuplicateSheet, UnknownDirective, FormulaSyntax };

class WorkbookParseError : public std::runtime_error {
public:
    WorkbookParseError(ParseErrorKind kind, int line, const std::string& what, std::size_t position = 0)
        : std::runtime_error(what), kind_(kind), line_(line), position_(position) {}

    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    /// Offset inside the formula for FormulaSyntax errors.
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    int line_;
    std::size_t position_;
};

inline constexpr std::string_view kWorkbookExtension = ".sheet";

/// Parses the line-oriented ".sheet" format. `default_name` is used without a WORKBOOK line.
Workbook parse_workbook(std::string_view text, std::string_view default_name = "workbook");

/// Inverse of parse_workbook for every workbook it can produce.
std::string serialize_workbook(const Workbook& wb);

/// Values-only CSV into a single sheet named "csv".
Workbook parse_csv(std::string_view text, std::string_view name);

/// Dispatches on extension (.csv or the workbook format); the name defaults to the file stem.
Workbook load_workbook(const std::filesystem::path& path);

}  // namespace sheetwarden
