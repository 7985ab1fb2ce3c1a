#pragma once

#include "sheetwarden/address.hpp"
#include "sheetwarden/graph.hpp"
#include "sheetwarden/workbook.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sheetwarden {

enum class Severity { Info, Warning, Error, Critical };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view text);

namespace detector_id {
inline constexpr std::string_view kHidden = "hidden";
inline constexpr std::string_view kMacros = "macros";
inline constexpr std::string_view kCircular = "circular";
inline constexpr std::string_view kHardcoded = "hardcoded";
inline constexpr std::string_view kInconsistent = "inconsistent";
}  // namespace detector_id

/// Registration order; run_all emits findings in this order.
const std::vector<std::string>& registered_detectors();

/// Empty sheet: workbook level. Sheet without cell: sheet level.
struct FindingLocation {
    std::string sheet;
    std::optional<GridPos> cell;

    friend bool operator==(const FindingLocation&, const FindingLocation&) = default;
};

struct Finding {
    std::string detector;
    Severity severity = Severity::Info;
    FindingLocation location;
    std::string message;
    std::map<std::string, std::string> evidence;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct AuditStats {
    std::map<std::string, std::size_t> per_detector;
    std::map<Severity, std::size_t> per_severity;

    friend bool operator==(const AuditStats&, const AuditStats&) = default;
};

struct AuditResult {
    std::string workbook;
    std::vector<Finding> findings;
    AuditStats stats;
    std::uint64_t audited_at = 0;

    friend bool operator==(const AuditResult&, const AuditResult&) = default;
};

struct DetectorConfig {
    std::set<std::string> enabled{registered_detectors().begin(), registered_detectors().end()};
    double inconsistency_threshold = 0.75;
    int min_run_length = 4;

    static DetectorConfig none() {
        DetectorConfig c;
        c.enabled.clear();
        return c;
    }
};

std::vector<Finding> detect_hidden(const Workbook& wb);
std::vector<Finding> detect_macros(const Workbook& wb);
std::vector<Finding> detect_circular(const Workbook& wb, const DependencyGraph& g);
std::vector<Finding> detect_hardcoded(const Workbook& wb);
std::vector<Finding> detect_inconsistent(const Workbook& wb, double threshold = 0.75, int min_run_length = 4);

AuditResult run_all(const Workbook& wb, const DetectorConfig& config, std::uint64_t tick = 0);

AuditStats summarize(const std::vector<Finding>& findings);

/// Formula with every reference rewritten as an offset from `host` ("R[0]C[-2]*2").
std::string formula_shape(const Expr& e, const CellAddress& host);

/// Region label used by ground truth: "C4", "row:4", "col:C", "sheet" or "workbook".
std::string finding_region(const Finding& f);

/// JSON Lines export with fields {workbook, detector, severity, sheet, cell, message, evidence}.
std::string to_json_line(std::string_view workbook, const Finding& f);

struct ParsedFinding {
    std::string workbook;
    Finding finding;
};

/// Inverse of to_json_line. Throws std::runtime_error on malformed input.
ParsedFinding parse_finding_line(std::string_view line);

}  // namespace sheetwarden
