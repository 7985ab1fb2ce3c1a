#pragma once

#include "sheetwarden/detectors.hpp"
#include "sheetwarden/workbook.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetwarden {

/// Evidence pulled from one workbook and its audit.
struct RiskVariables {
    int row_count = 0;  ///< highest populated row on any sheet
    int formula_count = 0;
    int macro_count = 0;
    int hidden_finding_count = 0;
    int error_finding_count = 0;  ///< Error/Critical findings, macro findings excluded
    int external_ref_count = 0;   ///< references naming a sheet the workbook lacks
    int importance_points = 3;    ///< 0..6
    bool methodology_declared = false;

    friend bool operator==(const RiskVariables&, const RiskVariables&) = default;
};

enum class RiskClass { Low, Moderate, High, Critical };

std::string_view to_string(RiskClass c);
std::optional<RiskClass> parse_risk_class(std::string_view text);

class InvalidWeights : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Capped weighted-sum scoring table. Every field is overridable from a weights file.
struct RiskWeights {
    double size = 10;
    double macro = 20;
    double hidden = 15;
    double error = 10;
    double external = 10;
    double importance = 5;
    double methodology = 10;  ///< credit subtracted when a methodology is declared

    int size_row_threshold = 150;  ///< "more than 150 rows" triggers the size weight
    int macro_cap = 3;
    int hidden_cap = 5;
    int error_cap = 5;
    int external_cap = 5;

    double moderate_at = 20;
    double high_at = 45;
    double critical_at = 70;

    /// Throws InvalidWeights on negative weights/caps or unordered thresholds.
    void validate() const;
};

struct RiskAssessment {
    double score = 0;
    RiskClass risk_class = RiskClass::Low;
    std::map<std::string, double> contributions;
};

int importance_points(const std::optional<Importance>& label);

RiskVariables extract_variables(const Workbook& wb, const AuditResult& audit);

RiskClass class_for_score(double score, const RiskWeights& w);

RiskAssessment classify(const RiskVariables& v, const RiskWeights& w = {});

/// `key=value` file; keys match the RiskWeights field names. Unknown keys throw ConfigError.
RiskWeights parse_weights(std::string_view text);

}  // namespace sheetwarden
