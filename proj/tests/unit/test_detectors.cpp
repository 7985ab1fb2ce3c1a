#include "oracles.hpp"

#include "sheetwarden/detectors.hpp"
#include "sheetwarden/graph.hpp"
#include "sheetwarden/workbook_io.hpp"

#include <doctest.h>

using namespace sheetwarden;

namespace {

Workbook sheet(const std::string& body, const std::string& head = "") {
    return parse_workbook(head + "SHEET Main\n" + body + "END\n", "t");
}

std::vector<Finding> hardcoded(const std::string& formula) {
    return detect_hardcoded(sheet("CELL A1 = 3\nCELL B1 := " + formula + "\n"));
}

}  // namespace

TEST_CASE("hidden regions") {
    CHECK(detect_hidden(sheet("CELL A1 = 1\n")).empty());

    auto f = detect_hidden(sheet("CELL A4 := =1+1\nHIDE ROW 4\n"));
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::Warning);
    CHECK_FALSE(f[0].location.cell);
    CHECK(f[0].location.sheet == "Main");
    CHECK(f[0].evidence.at("row") == "4");

    f = detect_hidden(sheet("HIDE CELL D4\n"));
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::Info);
    CHECK(f[0].location.cell == GridPos{4, 4});

    f = detect_hidden(sheet("CELL C2 = 1\nHIDE COL C\n"));
    REQUIRE(f.size() == 1);
    CHECK(f[0].evidence.at("col") == "C");
    CHECK(finding_region(f[0]) == "col:C");
}

TEST_CASE("macro escalation") {
    CHECK(detect_macros(sheet("")).empty());
    auto two = detect_macros(sheet("", "MACRO a 1\nx\nMACRO b 1\ny\n"));
    REQUIRE(two.size() == 2);
    CHECK(two[0].severity == Severity::Error);
    CHECK(two[1].severity == Severity::Error);
    auto one = detect_macros(sheet("", "META methodology true\nMACRO a 1\nx\n"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].severity == Severity::Warning);
    CHECK(finding_region(one[0]) == "workbook");
}

TEST_CASE("circular references") {
    auto wb = sheet("CELL A1 = 1\nCELL B1 := =A1\n");
    CHECK(detect_circular(wb, build_dependency_graph(wb)).empty());
    wb = sheet("CELL A1 := =B1\nCELL B1 := =A1\n");
    auto f = detect_circular(wb, build_dependency_graph(wb));
    CHECK(f.size() == 2);
    for (const auto& x : f) CHECK(x.severity == Severity::Error);
    wb = sheet("CELL A1 := =A1+1\n");
    CHECK(detect_circular(wb, build_dependency_graph(wb)).size() == 1);
}

TEST_CASE("circular findings match the cycle oracle on random grids") {
    Rng rng(41);
    for (int i = 0; i < 1000; ++i) {
        const auto wb = oracle::random_grid(rng);
        std::set<CellAddress> reported;
        for (const auto& f : detect_circular(wb, build_dependency_graph(wb)))
            reported.insert(CellAddress{f.location.sheet, f.location.cell->col, f.location.cell->row});
        REQUIRE(reported == oracle::cycle_cells(wb));
    }
}

TEST_CASE("hard-coded constants") {
    CHECK(hardcoded("=SUM(A1:A9)").empty());
    CHECK(hardcoded("=A1+1").empty());
    CHECK(hardcoded("=A1*-1").empty());
    CHECK(hardcoded("=2*3").empty());  // no reference involved
    auto f = hardcoded("=A1*1.175");
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::Warning);
    CHECK(f[0].evidence.at("literal") == "1.175");
    CHECK(hardcoded("=(A1+A2)*12+7").size() == 1);  // one finding per formula

    auto annotated = parse_workbook("SHEET Main\nCELL A1 = 3\nCELL B1 := =A1*12\nEND\nNOTE Main!B1 months\n");
    CHECK(detect_hardcoded(annotated).empty());
}

TEST_CASE("inconsistent formula runs") {
    std::string body;
    for (int r = 1; r <= 5; ++r) body += "CELL A" + std::to_string(r) + " = " + std::to_string(r) + "\n";
    std::string same = body;
    for (int r = 1; r <= 5; ++r) same += "CELL B" + std::to_string(r) + " := =A" + std::to_string(r) + "*2\n";
    CHECK(detect_inconsistent(sheet(same)).empty());

    std::string odd = body;
    for (int r = 1; r <= 5; ++r) odd += "CELL B" + std::to_string(r) + " := =A" + std::to_string(r) + (r == 3 ? "*3\n" : "*2\n");
    auto f = detect_inconsistent(sheet(odd));
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::Error);
    CHECK(f[0].location.cell == GridPos{3, 2});

    std::string split;
    for (int r = 1; r <= 4; ++r) split += "CELL B" + std::to_string(r) + " := =A" + std::to_string(r) + (r <= 2 ? "*3\n" : "*2\n");
    CHECK(detect_inconsistent(sheet(split)).empty());

    // Runs shorter than the minimum are ignored.
    CHECK(detect_inconsistent(sheet("CELL B1 := =A1*2\nCELL B2 := =A2*2\nCELL B3 := =A3*9\n")).empty());
}

TEST_CASE("formula shape uses relative offsets") {
    const CellAddress b2{"Main", 2, 2}, b3{"Main", 2, 3};
    CHECK(formula_shape(*parse_formula("=A2*2"), b2) == formula_shape(*parse_formula("=A3*2"), b3));
    CHECK(formula_shape(*parse_formula("=A2*2"), b2) != formula_shape(*parse_formula("=A4*2"), b3));
}

TEST_CASE("run_all composes detectors and honours config") {
    CHECK(run_all(Workbook{}, DetectorConfig{}).findings.empty());

    const auto wb = sheet("CELL A1 := =A1+1\n", "MACRO m 1\nx\n");
    const auto r = run_all(wb, DetectorConfig{});
    CHECK(r.stats.per_detector.at("circular") == 1);
    CHECK(r.stats.per_detector.at("macros") == 1);
    CHECK(r.stats.per_severity.at(Severity::Error) == 2);
    CHECK(run_all(wb, DetectorConfig::none()).findings.empty());
}

TEST_CASE("severity stats equal the findings that carry them") {
    Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        auto wb = oracle::random_grid(rng);
        if (rng.bernoulli(0.5)) wb.sheets[0].hidden_rows.insert(rng.between(1, 6));
        const auto r = run_all(wb, DetectorConfig{});
        std::map<Severity, std::size_t> count;
        for (const auto& f : r.findings) ++count[f.severity];
        REQUIRE(count == r.stats.per_severity);
        REQUIRE(r == run_all(wb, DetectorConfig{}));
    }
}

TEST_CASE("finding lines round trip") {
    const auto wb = sheet("CELL A1 = 1\nCELL B1 := =A1*1.5\nHIDE ROW 1\n", "MACRO m 1\nx\n");
    for (const auto& f : run_all(wb, DetectorConfig{}).findings) {
        const auto line = to_json_line("wb \"1\"", f);
        CHECK(line.find('\n') == std::string::npos);
        const auto back = parse_finding_line(line);
        CHECK(back.workbook == "wb \"1\"");
        CHECK(back.finding == f);
    }
}
