#pragma once

#include "sheetwarden/detectors.hpp"
#include "sheetwarden/rng.hpp"
#include "sheetwarden/workbook.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sheetwarden::corpus {

/// Injectable defects; each name matches the detector that should find it.
enum class DefectKind { Hidden, Circular, Hardcoded, Inconsistent };

inline constexpr DefectKind kAllKinds[] = {DefectKind::Hidden, DefectKind::Circular, DefectKind::Hardcoded,
                                           DefectKind::Inconsistent};

std::string_view to_string(DefectKind k);
std::optional<DefectKind> parse_defect_kind(std::string_view text);

/// One injected defect. `region` is "C4", "row:4", "col:C" or a comma list of cells ("I2,I4").
struct Defect {
    std::string workbook;
    DefectKind kind = DefectKind::Hidden;
    std::string sheet;
    std::string region;

    friend bool operator==(const Defect&, const Defect&) = default;
};

using GroundTruth = std::map<std::string, std::vector<Defect>>;

struct CorpusSpec {
    std::string name = "corpus";
    int n = 100;
    double size_mix = 0.5;  ///< probability a workbook is large (more than 150 populated rows)
    /// Per-kind independent injection probabilities. When empty, the any-defect model applies:
    /// a workbook is defective with the size-dependent rate and then gets one defect of a uniform kind.
    std::map<DefectKind, double> rates;
    double large_defect_rate = 0.90;
    double small_defect_rate = 0.30;
    double macro_rate = 0.70;
    std::uint64_t seed = 1;

    /// Survey of curated financial models: any-defect rate 0.95 regardless of size.
    static CorpusSpec kpmg();

    void validate() const;
};

/// `key=value` spec file: name, n, seed, size_mix, macro_rate, large_defect_rate,
/// small_defect_rate, preset (kpmg), rate.<kind>.
CorpusSpec parse_corpus_spec(std::string_view text);

struct GeneratedWorkbook {
    Workbook workbook;
    bool large = false;
    bool has_macros = false;
    std::vector<Defect> defects;
};

struct Corpus {
    std::vector<GeneratedWorkbook> workbooks;
    GroundTruth truth;
};

Corpus generate(const CorpusSpec& spec);

/// Defect-free workbook: a literal data block, consistent relative formula columns and a summary block.
Workbook generate_clean(Rng& rng, const std::string& name, bool large, double macro_rate);

class NoAdmissibleSite : public std::runtime_error {
public:
    explicit NoAdmissibleSite(DefectKind k)
        : std::runtime_error("no admissible site for a " + std::string(to_string(k)) + " defect"), kind_(k) {}
    DefectKind kind() const { return kind_; }

private:
    DefectKind kind_;
};

struct Injection {
    Workbook workbook;
    Defect defect;
};

Injection inject_error(const Workbook& wb, DefectKind kind, Rng& rng);

struct KindScore {
    std::size_t findings = 0;
    std::size_t matched_findings = 0;
    std::size_t truth = 0;
    std::size_t matched_truth = 0;
    double precision = 1.0;
    double recall = 1.0;
};

/// Does `f` (reported on `workbook`) land on defect `d`?
bool matches(const Defect& d, std::string_view workbook, const Finding& f);

std::map<DefectKind, KindScore> score_detectors(const std::vector<AuditResult>& audits, const GroundTruth& truth);
std::map<DefectKind, KindScore> score_detectors(const std::vector<ParsedFinding>& findings, const GroundTruth& truth);

std::string ground_truth_text(const GroundTruth& truth);
GroundTruth parse_ground_truth(std::string_view text);

inline constexpr std::string_view kGroundTruthFile = "ground_truth.tsv";

/// Writes `<dir>/<name>/wb_<index>.sheet` plus the ground-truth file; returns the corpus directory.
std::filesystem::path write_corpus(const Corpus& corpus, const CorpusSpec& spec, const std::filesystem::path& dir);

}  // namespace sheetwarden::corpus
