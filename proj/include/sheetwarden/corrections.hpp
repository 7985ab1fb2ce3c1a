#pragma once

#include "sheetwarden/detectors.hpp"
#include "sheetwarden/workbook.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sheetwarden {

struct RowTarget {
    int row = 1;
    friend bool operator==(const RowTarget&, const RowTarget&) = default;
};
struct ColTarget {
    int col = 1;
    friend bool operator==(const ColTarget&, const ColTarget&) = default;
};

struct CorrectionTarget {
    std::string sheet;
    std::variant<GridPos, RowTarget, ColTarget> region;

    friend bool operator==(const CorrectionTarget&, const CorrectionTarget&) = default;
};

std::string to_string(const CorrectionTarget& t);

/// Only value-preserving edits are correctable; circular and inconsistency findings are report-only.
enum class CorrectionKind { Unhide, AnnotateHardcoded };

std::string_view to_string(CorrectionKind k);

struct Correction {
    CorrectionKind kind = CorrectionKind::Unhide;
    CorrectionTarget target;
    std::string before;
    std::string after;

    friend bool operator==(const Correction&, const Correction&) = default;
};

struct CorrectionPolicy {
    bool unhide = true;
    bool annotate_hardcoded = true;
};

struct ChangeReport {
    std::string workbook;
    std::string recipient;
    std::vector<Correction> corrections;
    std::uint64_t produced_at = 0;

    friend bool operator==(const ChangeReport&, const ChangeReport&) = default;
};

class TargetMissing : public std::runtime_error {
public:
    explicit TargetMissing(const CorrectionTarget& t)
        : std::runtime_error("correction target missing: " + to_string(t)), target_(t) {}
    const CorrectionTarget& target() const { return target_; }

private:
    CorrectionTarget target_;
};

std::vector<Correction> plan_corrections(const AuditResult& audit, const CorrectionPolicy& policy = {});

struct CorrectedWorkbook {
    Workbook workbook;
    ChangeReport report;
};

inline constexpr std::string_view kDefaultRecipient = "audit-desk";

/// Returns a corrected copy. Corrections already in effect are skipped and left out of the report.
CorrectedWorkbook apply_corrections(const Workbook& wb, const std::vector<Correction>& plan, std::uint64_t tick = 0,
                                    std::string_view default_recipient = kDefaultRecipient);

std::string render_report(const ChangeReport& report);

/// `<tick>_<workbook>.report.json` with path-unsafe characters in the workbook name replaced.
std::string report_filename(const ChangeReport& report);

std::string report_to_json(const ChangeReport& report);
ChangeReport report_from_json(std::string_view text);

}  // namespace sheetwarden
