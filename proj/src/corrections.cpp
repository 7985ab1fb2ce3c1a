#include "sheetwarden/corrections.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace sheetwarden {

std::string to_string(const CorrectionTarget& t) {
    return std::visit(
        [&](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, GridPos>) return t.sheet + "!" + a1(r);
            else if constexpr (std::is_same_v<R, RowTarget>) return t.sheet + "!row:" + std::to_string(r.row);
            else return t.sheet + "!col:" + column_letters(r.col);
        },
        t.region);
}

std::string_view to_string(CorrectionKind k) {
    return k == CorrectionKind::Unhide ? "unhide" : "annotate-hardcoded";
}

std::vector<Correction> plan_corrections(const AuditResult& audit, const CorrectionPolicy& policy) {
    std::vector<Correction> plan;
    for (const auto& f : audit.findings) {
        if (f.detector == detector_id::kHidden && policy.unhide && f.severity >= Severity::Warning) {
            CorrectionTarget target{f.location.sheet, GridPos{}};
            if (f.location.cell) target.region = *f.location.cell;
            else if (auto it = f.evidence.find("row"); it != f.evidence.end()) target.region = RowTarget{std::stoi(it->second)};
            else if (auto jt = f.evidence.find("col"); jt != f.evidence.end())
                target.region = ColTarget{column_index(jt->second).value_or(1)};
            else continue;
            plan.push_back(Correction{CorrectionKind::Unhide, std::move(target), "hidden", "visible"});
        } else if (f.detector == detector_id::kHardcoded && policy.annotate_hardcoded && f.location.cell) {
            auto it = f.evidence.find("literal");
            const std::string literal = it == f.evidence.end() ? "?" : it->second;
            plan.push_back(Correction{CorrectionKind::AnnotateHardcoded,
                                      CorrectionTarget{f.location.sheet, *f.location.cell}, "",
                                      "hardcoded constant " + literal + " should live in an input cell"});
        }
    }
    return plan;
}

CorrectedWorkbook apply_corrections(const Workbook& wb, const std::vector<Correction>& plan, std::uint64_t tick,
                                    std::string_view default_recipient) {
    CorrectedWorkbook out{wb, {}};
    auto& result = out.workbook;
    out.report = ChangeReport{wb.name, wb.metadata.owner.value_or(std::string(default_recipient)), {}, tick};

    for (const auto& c : plan) {
        Sheet* sheet = result.find_sheet(c.target.sheet);
        if (!sheet) throw TargetMissing(c.target);
        bool applied = false;
        if (c.kind == CorrectionKind::Unhide) {
            if (const auto* pos = std::get_if<GridPos>(&c.target.region)) {
                auto it = sheet->cells.find(*pos);
                if (it == sheet->cells.end()) throw TargetMissing(c.target);
                applied = std::exchange(it->second.hidden, false);
            } else if (const auto* row = std::get_if<RowTarget>(&c.target.region)) {
                applied = sheet->hidden_rows.erase(row->row) > 0;
            } else {
                applied = sheet->hidden_cols.erase(std::get<ColTarget>(c.target.region).col) > 0;
            }
        } else {
            const auto* pos = std::get_if<GridPos>(&c.target.region);
            if (!pos || !sheet->find(*pos)) throw TargetMissing(c.target);
            const CellAddress addr{sheet->name, pos->col, pos->row};
            if (!result.has_annotation(addr)) {
                result.annotations.push_back(Annotation{addr, c.after});
                applied = true;
            }
        }
        if (applied) out.report.corrections.push_back(c);
    }
    return out;
}

std::string render_report(const ChangeReport& report) {
    std::ostringstream out;
    out << "Change report for " << report.workbook << '\n';
    out << "Recipient: " << report.recipient << '\n';
    out << "Tick: " << report.produced_at << '\n';
    out << "Corrections: " << report.corrections.size() << '\n';
    std::size_t i = 0;
    for (const auto& c : report.corrections) {
        out << '\n' << ++i << ". " << to_string(c.kind) << ' ' << to_string(c.target) << '\n';
        out << "   before: " << (c.before.empty() ? "(none)" : c.before) << '\n';
        out << "   after:  " << c.after << '\n';
    }
    return out.str();
}

std::string report_filename(const ChangeReport& report) {
    std::string safe;
    for (char ch : report.workbook) {
        const auto c = static_cast<unsigned char>(ch);
        safe.push_back(std::isalnum(c) || ch == '.' || ch == '-' || ch == '_' ? ch : '_');
    }
    return std::to_string(report.produced_at) + "_" + safe + ".report.json";
}

namespace {

nlohmann::ordered_json target_json(const CorrectionTarget& t) {
    nlohmann::ordered_json j;
    j["sheet"] = t.sheet;
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, GridPos>) j["cell"] = a1(r);
            else if constexpr (std::is_same_v<R, RowTarget>) j["row"] = r.row;
            else j["col"] = column_letters(r.col);
        },
        t.region);
    return j;
}

CorrectionTarget target_from_json(const nlohmann::json& j) {
    CorrectionTarget t{j.at("sheet").get<std::string>(), GridPos{}};
    if (j.contains("cell")) {
        const auto pos = parse_a1(j.at("cell").get<std::string>());
        if (!pos) throw std::runtime_error("bad cell in change report");
        t.region = *pos;
    } else if (j.contains("row")) {
        t.region = RowTarget{j.at("row").get<int>()};
    } else {
        const auto col = column_index(j.at("col").get<std::string>());
        if (!col) throw std::runtime_error("bad column in change report");
        t.region = ColTarget{*col};
    }
    return t;
}

}  // namespace

std::string report_to_json(const ChangeReport& report) {
    nlohmann::ordered_json j;
    j["workbook"] = report.workbook;
    j["recipient"] = report.recipient;
    j["produced_at"] = report.produced_at;
    j["corrections"] = nlohmann::ordered_json::array();
    for (const auto& c : report.corrections) {
        nlohmann::ordered_json cj;
        cj["kind"] = to_string(c.kind);
        cj["target"] = target_json(c.target);
        cj["before"] = c.before;
        cj["after"] = c.after;
        j["corrections"].push_back(std::move(cj));
    }
    return j.dump(2) + "\n";
}

ChangeReport report_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ChangeReport r;
        r.workbook = j.at("workbook").get<std::string>();
        r.recipient = j.at("recipient").get<std::string>();
        r.produced_at = j.at("produced_at").get<std::uint64_t>();
        for (const auto& cj : j.at("corrections")) {
            Correction c;
            const auto kind = cj.at("kind").get<std::string>();
            if (kind == "unhide") c.kind = CorrectionKind::Unhide;
            else if (kind == "annotate-hardcoded") c.kind = CorrectionKind::AnnotateHardcoded;
            else throw std::runtime_error("unknown correction kind '" + kind + "'");
            c.target = target_from_json(cj.at("target"));
            c.before = cj.at("before").get<std::string>();
            c.after = cj.at("after").get<std::string>();
            r.corrections.push_back(std::move(c));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed change report: ") + e.what());
    }
}

}  // namespace sheetwarden
