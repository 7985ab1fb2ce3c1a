#include "sheetwarden/workbook_io.hpp"

#include "sheetwarden/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sheetwarden {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

/// Splits off the first space-delimited token.
std::pair<std::string_view, std::string_view> next_token(std::string_view s) {
    const auto sp = s.find(' ');
    if (sp == std::string_view::npos) return {s, {}};
    return {s.substr(0, sp), s.substr(sp + 1)};
}

std::optional<double> parse_full_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::string> unquote_text(std::string_view s) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::nullopt;
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '"') {
            if (i + 2 < s.size() && s[i + 1] == '"') {
                out.push_back('"');
                ++i;
                continue;
            }
            return std::nullopt;
        }
        out.push_back(s[i]);
    }
    return out;
}

std::string quote_text(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    return out + "\"";
}

class WorkbookReader {
public:
    WorkbookReader(std::string_view text, std::string_view default_name) : lines_(split_lines(text)) {
        wb_.name = std::string(default_name);
    }

    Workbook read() {
        bool first_directive = true;
        for (line_idx_ = 0; line_idx_ < lines_.size(); ++line_idx_) {
            const auto line = lines_[line_idx_];
            if (trim(line).empty() || line.front() == '#') continue;
            const auto [directive, rest] = next_token(line);
            const bool was_first = first_directive;
            first_directive = false;
            if (directive == "WORKBOOK") {
                if (!was_first || rest.empty()) malformed("WORKBOOK must be the first directive and name the workbook");
                wb_.name = std::string(rest);
            } else if (directive == "META") {
                meta(rest);
            } else if (directive == "SHEET") {
                sheet(rest);
            } else if (directive == "END") {
                if (current_ < 0 || !rest.empty()) malformed("END without SHEET");
                current_ = -1;
            } else if (directive == "CELL") {
                cell(rest);
            } else if (directive == "HIDE") {
                hide(rest);
            } else if (directive == "MACRO") {
                macro(rest);
            } else if (directive == "NOTE") {
                note(rest);
            } else {
                throw WorkbookParseError(ParseErrorKind::UnknownDirective, line_no(),
                                         "line " + std::to_string(line_no()) + ": unknown directive '" +
                                             std::string(directive) + "'");
            }
        }
        if (current_ >= 0) {
            line_idx_ = lines_.empty() ? 0 : lines_.size() - 1;
            malformed("sheet '" + wb_.sheets[static_cast<std::size_t>(current_)].name + "' is missing END");
        }
        return std::move(wb_);
    }

private:
    int line_no() const { return static_cast<int>(line_idx_) + 1; }

    [[noreturn]] void malformed(const std::string& why) {
        throw WorkbookParseError(ParseErrorKind::MalformedLine, line_no(),
                                 "line " + std::to_string(line_no()) + ": " + why);
    }

    Sheet& current_sheet() {
        if (current_ < 0) malformed("directive outside SHEET ... END");
        return wb_.sheets[static_cast<std::size_t>(current_)];
    }

    GridPos address(std::string_view text) {
        const auto p = parse_a1(text);
        if (!p) malformed("bad cell address '" + std::string(text) + "'");
        return *p;
    }

    void meta(std::string_view rest) {
        const auto [key, value] = next_token(rest);
        if (value.empty()) malformed("META needs a key and a value");
        if (key == "importance") {
            const auto imp = parse_importance(value);
            if (!imp) malformed("unknown importance label '" + std::string(value) + "'");
            wb_.metadata.importance = imp;
        } else if (key == "methodology") {
            if (value == "true") wb_.metadata.methodology = true;
            else if (value == "false") wb_.metadata.methodology = false;
            else malformed("methodology must be true or false");
        } else if (key == "owner") {
            wb_.metadata.owner = std::string(value);
        } else {
            malformed("unknown META key '" + std::string(key) + "'");
        }
    }

    void sheet(std::string_view rest) {
        if (current_ >= 0) malformed("SHEET inside another SHEET");
        if (rest.empty() || rest.find(' ') != std::string_view::npos) malformed("SHEET needs one name");
        if (wb_.find_sheet(rest))
            throw WorkbookParseError(ParseErrorKind::DuplicateSheet, line_no(),
                                     "line " + std::to_string(line_no()) + ": duplicate sheet '" +
                                         std::string(rest) + "'");
        wb_.sheets.push_back(Sheet{std::string(rest), {}, {}, {}});
        current_ = static_cast<int>(wb_.sheets.size()) - 1;
    }

    void cell(std::string_view rest) {
        auto& sh = current_sheet();
        const auto [addr_text, after_addr] = next_token(rest);
        const auto [op, value] = next_token(after_addr);
        const auto pos = address(addr_text);
        if (value.empty()) malformed("CELL needs '= value' or ':= formula'");

        CellContent content;
        if (op == "=") {
            if (value.front() == '"') {
                auto text = unquote_text(value);
                if (!text) malformed("bad text literal");
                content = std::move(*text);
            } else {
                const auto num = parse_full_number(value);
                if (!num) malformed("bad number '" + std::string(value) + "'");
                content = *num;
            }
        } else if (op == ":=") {
            try {
                content = Formula{std::string(value), parse_formula(value)};
            } catch (const FormulaSyntaxError& e) {
                throw WorkbookParseError(ParseErrorKind::FormulaSyntax, line_no(),
                                         "line " + std::to_string(line_no()) + ": " + e.what(), e.position());
            }
        } else {
            malformed("expected '=' or ':=' after the address");
        }

        auto [it, inserted] = sh.cells.try_emplace(pos);
        if (!inserted && !it->second.empty())
            throw WorkbookParseError(ParseErrorKind::DuplicateCell, line_no(),
                                     "line " + std::to_string(line_no()) + ": duplicate cell " + a1(pos));
        it->second.content = std::move(content);
    }

    void hide(std::string_view rest) {
        auto& sh = current_sheet();
        const auto [what, target] = next_token(rest);
        if (target.empty() || target.find(' ') != std::string_view::npos) malformed("HIDE needs one target");
        if (what == "ROW") {
            const auto n = parse_full_number(target);
            if (!n || *n != std::floor(*n) || *n < 1 || *n > kMaxRows) malformed("bad row number");
            sh.hidden_rows.insert(static_cast<int>(*n));
        } else if (what == "COL") {
            const auto c = column_index(target);
            if (!c) malformed("bad column letters");
            sh.hidden_cols.insert(*c);
        } else if (what == "CELL") {
            sh.cells[address(target)].hidden = true;
        } else {
            malformed("HIDE takes ROW, COL or CELL");
        }
    }

    void macro(std::string_view rest) {
        const auto [name, count_text] = next_token(rest);
        const auto count = parse_full_number(count_text);
        if (name.empty() || !count || *count < 0 || *count != std::floor(*count))
            malformed("MACRO needs a name and a line count");
        const auto n = static_cast<std::size_t>(*count);
        if (line_idx_ + n >= lines_.size()) malformed("macro body is truncated");
        Macro m{std::string(name), {}};
        for (std::size_t i = 0; i < n; ++i) m.body.emplace_back(lines_[++line_idx_]);
        wb_.macros.push_back(std::move(m));
    }

    void note(std::string_view rest) {
        const auto [target, text] = next_token(rest);
        const auto bang = target.rfind('!');
        if (bang == std::string_view::npos || bang == 0 || text.empty()) malformed("NOTE needs Sheet!A1 and text");
        const auto pos = address(target.substr(bang + 1));
        wb_.annotations.push_back(
            Annotation{CellAddress{std::string(target.substr(0, bang)), pos.col, pos.row}, std::string(text)});
    }

    std::vector<std::string_view> lines_;
    std::size_t line_idx_ = 0;
    int current_ = -1;
    Workbook wb_;
};

void require_single_line(std::string_view s, std::string_view what) {
    if (s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos)
        throw std::invalid_argument(std::string(what) + " cannot contain a line break");
}

}  // namespace

Workbook parse_workbook(std::string_view text, std::string_view default_name) {
    return WorkbookReader(text, default_name).read();
}

std::string serialize_workbook(const Workbook& wb) {
    std::ostringstream out;
    require_single_line(wb.name, "workbook name");
    out << "WORKBOOK " << wb.name << '\n';
    if (wb.metadata.importance) out << "META importance " << to_string(*wb.metadata.importance) << '\n';
    if (wb.metadata.methodology) out << "META methodology " << (*wb.metadata.methodology ? "true" : "false") << '\n';
    if (wb.metadata.owner) {
        require_single_line(*wb.metadata.owner, "owner");
        out << "META owner " << *wb.metadata.owner << '\n';
    }
    for (const auto& m : wb.macros) {
        out << "MACRO " << m.name << ' ' << m.body.size() << '\n';
        for (const auto& line : m.body) {
            require_single_line(line, "macro body line");
            out << line << '\n';
        }
    }
    for (const auto& sheet : wb.sheets) {
        out << "SHEET " << sheet.name << '\n';
        for (const auto& [pos, cell] : sheet.cells) {
            std::visit(
                [&](const auto& c) {
                    using C = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<C, double>) {
                        out << "CELL " << a1(pos) << " = " << format_number(c) << '\n';
                    } else if constexpr (std::is_same_v<C, std::string>) {
                        require_single_line(c, "text cell");
                        out << "CELL " << a1(pos) << " = " << quote_text(c) << '\n';
                    } else if constexpr (std::is_same_v<C, Formula>) {
                        require_single_line(c.source, "formula");
                        out << "CELL " << a1(pos) << " := " << c.source << '\n';
                    }
                },
                cell.content);
        }
        for (int r : sheet.hidden_rows) out << "HIDE ROW " << r << '\n';
        for (int c : sheet.hidden_cols) out << "HIDE COL " << column_letters(c) << '\n';
        for (const auto& [pos, cell] : sheet.cells)
            if (cell.hidden) out << "HIDE CELL " << a1(pos) << '\n';
        out << "END\n";
    }
    for (const auto& a : wb.annotations) {
        require_single_line(a.text, "annotation");
        out << "NOTE " << to_string(a.address) << ' ' << a.text << '\n';
    }
    return out.str();
}

Workbook parse_csv(std::string_view text, std::string_view name) {
    Workbook wb;
    wb.name = std::string(name);
    Sheet sheet{"csv", {}, {}, {}};
    int row = 1;
    int col = 1;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;

    auto flush = [&] {
        if (row > kMaxRows || col > kMaxCols)
            throw WorkbookParseError(ParseErrorKind::MalformedLine, row, "csv exceeds the addressable grid");
        if (!field.empty() || was_quoted) {
            Cell cell;
            const auto num = was_quoted ? std::nullopt : parse_full_number(trim(field));
            if (num) cell.content = *num;
            else cell.content = field;
            if (!field.empty()) sheet.cells.emplace(GridPos{row, col}, std::move(cell));
        }
        field.clear();
        was_quoted = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = was_quoted = true;
        } else if (c == ',') {
            flush();
            ++col;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            flush();
            ++row;
            col = 1;
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw WorkbookParseError(ParseErrorKind::MalformedLine, row, "unterminated quoted csv field");
    flush();
    wb.sheets.push_back(std::move(sheet));
    return wb;
}

Workbook load_workbook(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    const auto stem = path.stem().string();
    if (path.extension() == ".csv") return parse_csv(text, stem);
    return parse_workbook(text, stem);
}

}  // namespace sheetwarden
