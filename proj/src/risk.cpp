#include "sheetwarden/risk.hpp"

#include "sheetwarden/keyvalue.hpp"

#include <algorithm>

namespace sheetwarden {

std::string_view to_string(RiskClass c) {
    switch (c) {
        case RiskClass::Low: return "Low";
        case RiskClass::Moderate: return "Moderate";
        case RiskClass::High: return "High";
        case RiskClass::Critical: return "Critical";
    }
    return "Low";
}

std::optional<RiskClass> parse_risk_class(std::string_view text) {
    for (auto c : {RiskClass::Low, RiskClass::Moderate, RiskClass::High, RiskClass::Critical})
        if (to_string(c) == text) return c;
    return std::nullopt;
}

void RiskWeights::validate() const {
    for (double w : {size, macro, hidden, error, external, importance, methodology})
        if (!(w >= 0)) throw InvalidWeights("weights must be non-negative");
    for (int cap : {size_row_threshold, macro_cap, hidden_cap, error_cap, external_cap})
        if (cap < 0) throw InvalidWeights("caps and the size threshold must be non-negative");
    if (!(0 <= moderate_at && moderate_at < high_at && high_at < critical_at))
        throw InvalidWeights("thresholds must satisfy 0 <= moderate < high < critical");
}

int importance_points(const std::optional<Importance>& label) {
    if (!label || *label == Importance::DontKnow) return 3;
    return static_cast<int>(*label);
}

namespace {

/// References (a range counts once) that name a sheet missing from the workbook.
int count_external_refs(const Expr& e, const Workbook& wb) {
    auto external = [&](const CellRef& r) { return !r.sheet.empty() && !wb.find_sheet(r.sheet); };
    return std::visit(
        [&](const auto& n) -> int {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, RefNode>) return external(n.ref);
            else if constexpr (std::is_same_v<N, RangeNode>) return external(n.first);
            else if constexpr (std::is_same_v<N, UnaryNode>) return count_external_refs(*n.operand, wb);
            else if constexpr (std::is_same_v<N, BinaryNode>)
                return count_external_refs(*n.lhs, wb) + count_external_refs(*n.rhs, wb);
            else if constexpr (std::is_same_v<N, CallNode>) {
                int total = 0;
                for (const auto& a : n.args) total += count_external_refs(*a, wb);
                return total;
            } else {
                return 0;
            }
        },
        e.node);
}

}  // namespace

RiskVariables extract_variables(const Workbook& wb, const AuditResult& audit) {
    RiskVariables v;
    for_each_cell(wb, [&](const CellAddress& addr, const Cell& cell) {
        if (cell.empty()) return;
        v.row_count = std::max(v.row_count, addr.row);
        if (const auto* f = cell.formula()) {
            ++v.formula_count;
            v.external_ref_count += count_external_refs(*f->ast, wb);
        }
    });
    v.macro_count = static_cast<int>(wb.macros.size());
    for (const auto& f : audit.findings) {
        if (f.detector == detector_id::kHidden) ++v.hidden_finding_count;
        if (f.detector != detector_id::kMacros && f.severity >= Severity::Error) ++v.error_finding_count;
    }
    v.importance_points = importance_points(wb.metadata.importance);
    v.methodology_declared = wb.metadata.methodology_declared();
    return v;
}

RiskClass class_for_score(double score, const RiskWeights& w) {
    if (score >= w.critical_at) return RiskClass::Critical;
    if (score >= w.high_at) return RiskClass::High;
    if (score >= w.moderate_at) return RiskClass::Moderate;
    return RiskClass::Low;
}

RiskAssessment classify(const RiskVariables& v, const RiskWeights& w) {
    w.validate();
    auto capped = [](int count, int cap) { return static_cast<double>(std::clamp(count, 0, cap)); };

    RiskAssessment a;
    auto& c = a.contributions;
    c["size"] = v.row_count > w.size_row_threshold ? w.size : 0.0;
    c["macros"] = w.macro * capped(v.macro_count, w.macro_cap);
    c["hidden"] = w.hidden * capped(v.hidden_finding_count, w.hidden_cap);
    c["errors"] = w.error * capped(v.error_finding_count, w.error_cap);
    c["external"] = w.external * capped(v.external_ref_count, w.external_cap);
    c["importance"] = w.importance * static_cast<double>(std::clamp(v.importance_points, 0, 6));

    double positive = 0;
    for (const auto& [_, points] : c) positive += points;
    // The credit never drives the score below zero, so the contributions still sum to it.
    const double credit = v.methodology_declared ? std::min(w.methodology, positive) : 0.0;
    c["methodology"] = -credit;
    a.score = positive - credit;
    a.risk_class = class_for_score(a.score, w);
    return a;
}

RiskWeights parse_weights(std::string_view text) {
    RiskWeights w;
    const std::map<std::string, double RiskWeights::*> doubles = {
        {"size", &RiskWeights::size},
        {"macro", &RiskWeights::macro},
        {"hidden", &RiskWeights::hidden},
        {"error", &RiskWeights::error},
        {"external", &RiskWeights::external},
        {"importance", &RiskWeights::importance},
        {"methodology", &RiskWeights::methodology},
        {"moderate_at", &RiskWeights::moderate_at},
        {"high_at", &RiskWeights::high_at},
        {"critical_at", &RiskWeights::critical_at},
    };
    const std::map<std::string, int RiskWeights::*> ints = {
        {"size_row_threshold", &RiskWeights::size_row_threshold},
        {"macro_cap", &RiskWeights::macro_cap},
        {"hidden_cap", &RiskWeights::hidden_cap},
        {"error_cap", &RiskWeights::error_cap},
        {"external_cap", &RiskWeights::external_cap},
    };
    for (const auto& kv : parse_key_values(text)) {
        if (auto it = doubles.find(kv.key); it != doubles.end()) w.*(it->second) = parse_double_value(kv);
        else if (auto jt = ints.find(kv.key); jt != ints.end())
            w.*(jt->second) = static_cast<int>(parse_int_value(kv));
        else throw ConfigError("line " + std::to_string(kv.line) + ": unknown weight '" + kv.key + "'");
    }
    w.validate();
    return w;
}

}  // namespace sheetwarden
