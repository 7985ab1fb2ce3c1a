#include "sheetwarden/detectors.hpp"

#include "sheetwarden/keyvalue.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace sheetwarden {

namespace {

Finding make_finding(std::string_view detector, Severity sev, FindingLocation loc, std::string message,
                     std::map<std::string, std::string> evidence = {}) {
    return Finding{std::string(detector), sev, std::move(loc), std::move(message), std::move(evidence)};
}

// (sheet, row, col) with sheet-level row/column findings keyed on row 0 / col 0.
std::tuple<std::string, int, int> order_key(const Finding& f) {
    if (f.location.cell) return {f.location.sheet, f.location.cell->row, f.location.cell->col};
    auto num = [&](const char* key) {
        auto it = f.evidence.find(key);
        return it == f.evidence.end() ? 0 : std::stoi(it->second);
    };
    int col = 0;
    if (auto it = f.evidence.find("col"); it != f.evidence.end()) col = column_index(it->second).value_or(0);
    return {f.location.sheet, num("row"), col};
}

void sort_by_address(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(),
                     [](const Finding& a, const Finding& b) { return order_key(a) < order_key(b); });
}

}  // namespace

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Info: return "Info";
        case Severity::Warning: return "Warning";
        case Severity::Error: return "Error";
        case Severity::Critical: return "Critical";
    }
    return "Info";
}

std::optional<Severity> parse_severity(std::string_view text) {
    for (auto s : {Severity::Info, Severity::Warning, Severity::Error, Severity::Critical})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

const std::vector<std::string>& registered_detectors() {
    static const std::vector<std::string> ids = {
        std::string(detector_id::kHidden),    std::string(detector_id::kMacros),
        std::string(detector_id::kCircular),  std::string(detector_id::kHardcoded),
        std::string(detector_id::kInconsistent),
    };
    return ids;
}

// ---------------------------------------------------------------------------

std::vector<Finding> detect_hidden(const Workbook& wb) {
    std::vector<Finding> out;
    for (const auto& sheet : wb.sheets) {
        for (int row : sheet.hidden_rows) {
            std::size_t populated = 0;
            for (auto it = sheet.cells.lower_bound(GridPos{row, 1}); it != sheet.cells.end() && it->first.row == row;
                 ++it)
                populated += !it->second.empty();
            const bool warn = populated > 0;
            out.push_back(make_finding(detector_id::kHidden, warn ? Severity::Warning : Severity::Info,
                                       {sheet.name, std::nullopt},
                                       warn ? "hidden row " + std::to_string(row) + " holds content"
                                            : "hidden row " + std::to_string(row) + " is empty",
                                       {{"row", std::to_string(row)}, {"populated", std::to_string(populated)}}));
        }
        for (int col : sheet.hidden_cols) {
            std::size_t populated = 0;
            for (const auto& [pos, cell] : sheet.cells) populated += pos.col == col && !cell.empty();
            const bool warn = populated > 0;
            const auto letters = column_letters(col);
            out.push_back(make_finding(detector_id::kHidden, warn ? Severity::Warning : Severity::Info,
                                       {sheet.name, std::nullopt},
                                       warn ? "hidden column " + letters + " holds content"
                                            : "hidden column " + letters + " is empty",
                                       {{"col", letters}, {"populated", std::to_string(populated)}}));
        }
        for (const auto& [pos, cell] : sheet.cells) {
            if (!cell.hidden) continue;
            const bool warn = !cell.empty();
            out.push_back(make_finding(detector_id::kHidden, warn ? Severity::Warning : Severity::Info,
                                       {sheet.name, pos},
                                       warn ? "hidden cell " + a1(pos) + " holds content"
                                            : "hidden cell " + a1(pos) + " is empty"));
        }
    }
    sort_by_address(out);
    return out;
}

std::vector<Finding> detect_macros(const Workbook& wb) {
    std::vector<Finding> out;
    const bool methodology = wb.metadata.methodology_declared();
    for (const auto& m : wb.macros) {
        out.push_back(make_finding(
            detector_id::kMacros, methodology ? Severity::Warning : Severity::Error, {},
            methodology ? "macro '" + m.name + "' present"
                        : "macro '" + m.name + "' present without a declared development methodology",
            {{"macro", m.name},
             {"lines", std::to_string(m.body.size())},
             {"methodology", methodology ? "true" : "false"}}));
    }
    return out;
}

std::vector<Finding> detect_circular(const Workbook& wb, const DependencyGraph& g) {
    std::vector<Finding> out;
    for (const auto& addr : g.cycle_set) {
        if (!wb.find_cell(addr)) continue;
        out.push_back(make_finding(detector_id::kCircular, Severity::Error, {addr.sheet, addr.pos()},
                                   "cell " + a1(addr.col, addr.row) + " is part of a circular reference"));
    }
    sort_by_address(out);
    return out;
}

namespace {

std::optional<double> literal_value(const Expr& e) {
    if (const auto* n = std::get_if<NumberNode>(&e.node)) return n->value;
    if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
        if (const auto inner = literal_value(*u->operand)) return u->op == UnaryOp::Minus ? -*inner : *inner;
    }
    return std::nullopt;
}

bool contains_reference(const Expr& e) {
    bool found = false;
    for_each_ref(e, [&](const CellRef&) { found = true; });
    return found;
}

bool exempt_literal(double v) { return v == 0 || v == 1 || v == -1; }

/// First literal combined arithmetically with a reference-bearing operand.
std::optional<double> hardcoded_literal(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::optional<double> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, BinaryNode>) {
                if (is_arithmetic(n.op)) {
                    const auto l = literal_value(*n.lhs);
                    if (l && !exempt_literal(*l) && contains_reference(*n.rhs)) return l;
                    const auto r = literal_value(*n.rhs);
                    if (r && !exempt_literal(*r) && contains_reference(*n.lhs)) return r;
                }
                if (auto x = hardcoded_literal(*n.lhs)) return x;
                return hardcoded_literal(*n.rhs);
            } else if constexpr (std::is_same_v<N, UnaryNode>) {
                return hardcoded_literal(*n.operand);
            } else if constexpr (std::is_same_v<N, CallNode>) {
                for (const auto& a : n.args)
                    if (auto x = hardcoded_literal(*a)) return x;
                return std::nullopt;
            } else {
                return std::nullopt;
            }
        },
        e.node);
}

}  // namespace

std::vector<Finding> detect_hardcoded(const Workbook& wb) {
    std::vector<Finding> out;
    for_each_cell(wb, [&](const CellAddress& addr, const Cell& cell) {
        const auto* f = cell.formula();
        if (!f || wb.has_annotation(addr)) return;
        if (const auto lit = hardcoded_literal(*f->ast)) {
            const auto text = format_number(*lit);
            out.push_back(make_finding(detector_id::kHardcoded, Severity::Warning, {addr.sheet, addr.pos()},
                                       "formula " + f->source + " embeds the constant " + text,
                                       {{"literal", text}}));
        }
    });
    sort_by_address(out);
    return out;
}

std::string formula_shape(const Expr& e, const CellAddress& host) {
    return print_expr(e, [&](const CellRef& r, bool) {
        std::string out = r.sheet.empty() ? "" : r.sheet + "!";
        return out + "R[" + std::to_string(r.row - host.row) + "]C[" + std::to_string(r.col - host.col) + "]";
    });
}

std::vector<Finding> detect_inconsistent(const Workbook& wb, double threshold, int min_run_length) {
    std::vector<Finding> out;
    std::set<CellAddress> flagged;

    for (const auto& sheet : wb.sheets) {
        std::map<GridPos, std::string> shapes;
        for (const auto& [pos, cell] : sheet.cells)
            if (const auto* f = cell.formula()) shapes.emplace(pos, formula_shape(*f->ast, {sheet.name, pos.col, pos.row}));

        auto check_run = [&](const std::vector<GridPos>& run, const char* direction) {
            if (static_cast<int>(run.size()) < min_run_length) return;
            std::map<std::string, std::size_t> tally;
            for (const auto& p : run) ++tally[shapes.at(p)];
            const auto best = std::max_element(tally.begin(), tally.end(),
                                               [](const auto& a, const auto& b) { return a.second < b.second; });
            const double share = static_cast<double>(best->second) / static_cast<double>(run.size());
            if (share < threshold || best->second == run.size()) return;
            const auto span = a1(run.front()) + ":" + a1(run.back());
            for (const auto& p : run) {
                const auto& actual = shapes.at(p);
                if (actual == best->first) continue;
                if (!flagged.insert(CellAddress{sheet.name, p.col, p.row}).second) continue;
                out.push_back(make_finding(detector_id::kInconsistent, Severity::Error, {sheet.name, p},
                                           "formula in " + a1(p) + " deviates from its " + direction + " run " + span,
                                           {{"expected", best->first},
                                            {"actual", actual},
                                            {"direction", direction},
                                            {"run", span}}));
            }
        };

        // Vertical runs: the map is row-major, so collect per column first.
        std::map<int, std::vector<int>> rows_by_col;
        for (const auto& [pos, _] : shapes) rows_by_col[pos.col].push_back(pos.row);
        for (const auto& [col, rows] : rows_by_col) {
            std::vector<GridPos> run;
            for (int r : rows) {
                if (!run.empty() && run.back().row + 1 != r) {
                    check_run(run, "vertical");
                    run.clear();
                }
                run.push_back({r, col});
            }
            check_run(run, "vertical");
        }
        std::vector<GridPos> run;
        for (const auto& [pos, _] : shapes) {
            if (!run.empty() && (run.back().row != pos.row || run.back().col + 1 != pos.col)) {
                check_run(run, "horizontal");
                run.clear();
            }
            run.push_back(pos);
        }
        check_run(run, "horizontal");
    }
    sort_by_address(out);
    return out;
}

AuditStats summarize(const std::vector<Finding>& findings) {
    AuditStats stats;
    for (const auto& f : findings) {
        ++stats.per_detector[f.detector];
        ++stats.per_severity[f.severity];
    }
    return stats;
}

AuditResult run_all(const Workbook& wb, const DetectorConfig& config, std::uint64_t tick) {
    AuditResult result{wb.name, {}, {}, tick};
    auto on = [&](std::string_view id) { return config.enabled.count(std::string(id)) > 0; };
    auto append = [&](std::vector<Finding> fs) {
        result.findings.insert(result.findings.end(), std::make_move_iterator(fs.begin()),
                               std::make_move_iterator(fs.end()));
    };
    if (on(detector_id::kHidden)) append(detect_hidden(wb));
    if (on(detector_id::kMacros)) append(detect_macros(wb));
    if (on(detector_id::kCircular)) append(detect_circular(wb, build_dependency_graph(wb)));
    if (on(detector_id::kHardcoded)) append(detect_hardcoded(wb));
    if (on(detector_id::kInconsistent))
        append(detect_inconsistent(wb, config.inconsistency_threshold, config.min_run_length));
    result.stats = summarize(result.findings);
    return result;
}

std::string finding_region(const Finding& f) {
    if (f.location.sheet.empty()) return "workbook";
    if (f.location.cell) return a1(*f.location.cell);
    if (auto it = f.evidence.find("row"); it != f.evidence.end()) return "row:" + it->second;
    if (auto it = f.evidence.find("col"); it != f.evidence.end()) return "col:" + it->second;
    return "sheet";
}

std::string to_json_line(std::string_view workbook, const Finding& f) {
    nlohmann::ordered_json j;
    j["workbook"] = workbook;
    j["detector"] = f.detector;
    j["severity"] = to_string(f.severity);
    j["sheet"] = f.location.sheet.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(f.location.sheet);
    j["cell"] = f.location.cell ? nlohmann::ordered_json(a1(*f.location.cell)) : nlohmann::ordered_json(nullptr);
    j["message"] = f.message;
    j["evidence"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : f.evidence) j["evidence"][k] = v;
    return j.dump();
}

ParsedFinding parse_finding_line(std::string_view line) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw std::runtime_error("finding line is not a JSON object");
    try {
        ParsedFinding out;
        out.workbook = j.at("workbook").get<std::string>();
        auto& f = out.finding;
        f.detector = j.at("detector").get<std::string>();
        const auto sev = parse_severity(j.at("severity").get<std::string>());
        if (!sev) throw std::runtime_error("unknown severity");
        f.severity = *sev;
        if (!j.at("sheet").is_null()) f.location.sheet = j.at("sheet").get<std::string>();
        if (!j.at("cell").is_null()) {
            const auto pos = parse_a1(j.at("cell").get<std::string>());
            if (!pos) throw std::runtime_error("bad cell in finding");
            f.location.cell = *pos;
        }
        f.message = j.at("message").get<std::string>();
        for (const auto& [k, v] : j.at("evidence").items()) f.evidence[k] = v.get<std::string>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed finding line: ") + e.what());
    }
}

}  // namespace sheetwarden
