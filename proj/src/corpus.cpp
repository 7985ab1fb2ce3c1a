#include "sheetwarden/corpus.hpp"

#include "sheetwarden/graph.hpp"
#include "sheetwarden/keyvalue.hpp"
#include "sheetwarden/workbook_io.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sheetwarden::corpus {

std::string_view to_string(DefectKind k) {
    switch (k) {
        case DefectKind::Hidden: return detector_id::kHidden;
        case DefectKind::Circular: return detector_id::kCircular;
        case DefectKind::Hardcoded: return detector_id::kHardcoded;
        case DefectKind::Inconsistent: return detector_id::kInconsistent;
    }
    return "?";
}

std::optional<DefectKind> parse_defect_kind(std::string_view text) {
    for (auto k : kAllKinds)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

CorpusSpec CorpusSpec::kpmg() {
    CorpusSpec s;
    s.name = "kpmg";
    s.large_defect_rate = 0.95;
    s.small_defect_rate = 0.95;
    return s;
}

void CorpusSpec::validate() const {
    auto prob = [](double p, const std::string& what) {
        if (!(p >= 0 && p <= 1)) throw ConfigError(what + " must lie in [0, 1]");
    };
    if (n < 1) throw ConfigError("n must be at least 1");
    prob(size_mix, "size_mix");
    prob(large_defect_rate, "large_defect_rate");
    prob(small_defect_rate, "small_defect_rate");
    prob(macro_rate, "macro_rate");
    for (const auto& [k, p] : rates) prob(p, "rate." + std::string(to_string(k)));
}

CorpusSpec parse_corpus_spec(std::string_view text) {
    const auto kvs = parse_key_values(text);
    CorpusSpec spec;
    // A preset replaces the defaults before any explicit key applies.
    for (const auto& kv : kvs) {
        if (kv.key != "preset") continue;
        if (kv.value != "kpmg") throw ConfigError("line " + std::to_string(kv.line) + ": unknown preset '" + kv.value + "'");
        spec = CorpusSpec::kpmg();
    }
    for (const auto& kv : kvs) {
        if (kv.key == "preset") continue;
        if (kv.key == "name") spec.name = kv.value;
        else if (kv.key == "n") spec.n = static_cast<int>(parse_int_value(kv));
        else if (kv.key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int_value(kv));
        else if (kv.key == "size_mix") spec.size_mix = parse_double_value(kv);
        else if (kv.key == "macro_rate") spec.macro_rate = parse_double_value(kv);
        else if (kv.key == "large_defect_rate") spec.large_defect_rate = parse_double_value(kv);
        else if (kv.key == "small_defect_rate") spec.small_defect_rate = parse_double_value(kv);
        else if (kv.key.rfind("rate.", 0) == 0) {
            const auto kind = parse_defect_kind(std::string_view(kv.key).substr(5));
            if (!kind) throw ConfigError("line " + std::to_string(kv.line) + ": unknown defect kind in '" + kv.key + "'");
            spec.rates[*kind] = parse_double_value(kv);
        } else {
            throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
        }
    }
    if (spec.name.empty() || spec.name.find('/') != std::string::npos) throw ConfigError("bad corpus name");
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Clean generation

namespace {

constexpr std::string_view kSheet = "Main";

ExprPtr ref(int col, int row) { return make_ref(CellRef{"", col, row}); }

void put(Sheet& s, int col, int row, CellContent content) { s.cells[GridPos{row, col}].content = std::move(content); }

void put_formula(Sheet& s, int col, int row, const ExprPtr& ast) {
    put(s, col, row, Formula{print_formula(*ast), ast});
}

}  // namespace

Workbook generate_clean(Rng& rng, const std::string& name, bool large, double macro_rate) {
    Workbook wb;
    wb.name = name;
    Sheet sheet{std::string(kSheet), {}, {}, {}};

    const int data_rows = large ? rng.between(151, 199) : rng.between(8, 60);
    const int first = 2;
    const int last = first + data_rows - 1;

    // A: label, B: quantity, C: unit price, D: cost. E.. : per-row formulas.
    const char* headers[] = {"Item", "Qty", "Price", "Cost", "Gross", "Margin", "Total"};
    const int formula_cols = rng.between(2, 3);
    for (int c = 1; c <= 4 + formula_cols; ++c) put(sheet, c, 1, std::string(headers[c - 1]));
    for (int r = first; r <= last; ++r) {
        put(sheet, 1, r, "item-" + std::to_string(r - 1));
        put(sheet, 2, r, static_cast<double>(rng.between(1, 500)));
        put(sheet, 3, r, static_cast<double>(rng.between(50, 9999)) / 100.0);
        put(sheet, 4, r, static_cast<double>(rng.between(10, 20000)));
        put_formula(sheet, 5, r, make_binary(BinaryOp::Mul, ref(2, r), ref(3, r)));
        put_formula(sheet, 6, r, make_binary(BinaryOp::Sub, ref(5, r), ref(4, r)));
        if (formula_cols == 3) put_formula(sheet, 7, r, make_call(Function::Sum, {make_range({"", 2, r}, {"", 4, r})}));
    }

    // Summary block two columns right of the formulas: three cells, one of which reads the other two.
    const int label_col = 4 + formula_cols + 2;
    const int sum_col = label_col + 1;
    put(sheet, label_col, 2, std::string("Gross total"));
    put(sheet, label_col, 3, std::string("Mean margin"));
    put(sheet, label_col, 4, std::string("Check"));
    put_formula(sheet, sum_col, 2, make_call(Function::Sum, {make_range({"", 5, first}, {"", 5, last})}));
    put_formula(sheet, sum_col, 3, make_call(Function::Average, {make_range({"", 6, first}, {"", 6, last})}));
    put_formula(sheet, sum_col, 4, make_binary(BinaryOp::Sub, ref(sum_col, 2), ref(sum_col, 3)));

    wb.sheets.push_back(std::move(sheet));

    const std::size_t label = rng.below(8);
    if (label < 7) wb.metadata.importance = static_cast<Importance>(label);
    switch (rng.below(3)) {
        case 0: wb.metadata.methodology = true; break;
        case 1: wb.metadata.methodology = false; break;
        default: break;
    }
    wb.metadata.owner = "owner-" + std::to_string(rng.between(1, 5));

    if (rng.bernoulli(macro_rate)) {
        const int count = rng.between(1, 3);
        for (int m = 1; m <= count; ++m) {
            const auto macro_name = "Macro" + std::to_string(m);
            wb.macros.push_back(Macro{macro_name,
                                      {"Sub " + macro_name + "()", "    ' refresh totals",
                                       "    Calculate", "End Sub"}});
        }
    }
    return wb;
}

// ---------------------------------------------------------------------------
// Injection

namespace {

/// Formula cells belonging to a contiguous run of at least `min_len` formula cells.
std::set<CellAddress> cells_in_runs(const Sheet& sheet, int min_len) {
    std::set<CellAddress> out;
    auto is_formula = [&](int row, int col) {
        const auto* c = sheet.find(GridPos{row, col});
        return c && c->formula();
    };
    for (const auto& [pos, cell] : sheet.cells) {
        if (!cell.formula()) continue;
        for (auto [dr, dc] : {std::pair{1, 0}, std::pair{0, 1}}) {
            if (is_formula(pos.row - dr, pos.col - dc)) continue;  // not the start of a run
            int len = 0;
            while (is_formula(pos.row + dr * len, pos.col + dc * len)) ++len;
            if (len >= min_len)
                for (int i = 0; i < len; ++i) out.insert(CellAddress{sheet.name, pos.col + dc * i, pos.row + dr * i});
        }
    }
    return out;
}

/// Runs of at least `min_len` formula cells whose members all share one shape.
std::vector<std::vector<GridPos>> homogeneous_runs(const Sheet& sheet, int min_len) {
    std::vector<std::vector<GridPos>> runs;
    auto formula_at = [&](int row, int col) -> const Formula* {
        const auto* c = sheet.find(GridPos{row, col});
        return c ? c->formula() : nullptr;
    };
    for (const auto& [pos, cell] : sheet.cells) {
        if (!cell.formula()) continue;
        for (auto [dr, dc] : {std::pair{1, 0}, std::pair{0, 1}}) {
            if (formula_at(pos.row - dr, pos.col - dc)) continue;
            std::vector<GridPos> run;
            std::set<std::string> shapes;
            for (int i = 0;; ++i) {
                const GridPos p{pos.row + dr * i, pos.col + dc * i};
                const auto* f = formula_at(p.row, p.col);
                if (!f) break;
                run.push_back(p);
                shapes.insert(formula_shape(*f->ast, {sheet.name, p.col, p.row}));
            }
            if (static_cast<int>(run.size()) >= min_len && shapes.size() == 1) runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::string join_cells(const std::set<CellAddress>& cells) {
    std::string out;
    for (const auto& c : cells) {
        if (!out.empty()) out += ",";
        out += a1(c.col, c.row);
    }
    return out;
}

void set_formula(Workbook& wb, const CellAddress& at, const ExprPtr& ast) {
    wb.find_sheet(at.sheet)->cells[at.pos()].content = Formula{print_formula(*ast), ast};
}

constexpr double kLiterals[] = {1.175, 1.2, 0.175, 12, 365, 7.5, 0.8};

Injection inject_hidden(const Workbook& wb, Rng& rng) {
    struct Site {
        std::string sheet;
        int mode;  // 0 cell, 1 row, 2 col
        GridPos pos;
    };
    std::vector<Site> cells, rows, cols;
    for (const auto& sheet : wb.sheets) {
        std::set<int> seen_rows, seen_cols;
        for (const auto& [pos, cell] : sheet.cells) {
            if (cell.empty()) continue;
            if (!cell.hidden) cells.push_back({sheet.name, 0, pos});
            if (!sheet.hidden_rows.count(pos.row) && seen_rows.insert(pos.row).second) rows.push_back({sheet.name, 1, pos});
            if (!sheet.hidden_cols.count(pos.col) && seen_cols.insert(pos.col).second) cols.push_back({sheet.name, 2, pos});
        }
    }
    std::vector<const std::vector<Site>*> pools;
    for (const auto* pool : {&cells, &rows, &cols})
        if (!pool->empty()) pools.push_back(pool);
    if (pools.empty()) throw NoAdmissibleSite(DefectKind::Hidden);

    const auto& site = rng.pick(*pools[rng.below(pools.size())]);
    Injection out{wb, {wb.name, DefectKind::Hidden, site.sheet, {}}};
    auto* sheet = out.workbook.find_sheet(site.sheet);
    if (site.mode == 0) {
        sheet->cells[site.pos].hidden = true;
        out.defect.region = a1(site.pos);
    } else if (site.mode == 1) {
        sheet->hidden_rows.insert(site.pos.row);
        out.defect.region = "row:" + std::to_string(site.pos.row);
    } else {
        sheet->hidden_cols.insert(site.pos.col);
        out.defect.region = "col:" + column_letters(site.pos.col);
    }
    return out;
}

Injection inject_circular(const Workbook& wb, Rng& rng) {
    // (target, reader): rewrite `target` to also read `reader`, which already reads `target`.
    std::vector<std::pair<CellAddress, CellAddress>> preferred, fallback;
    for (const auto& sheet : wb.sheets) {
        const auto in_runs = cells_in_runs(sheet, 4);
        for (const auto& [pos, cell] : sheet.cells) {
            const auto* f = cell.formula();
            if (!f) continue;
            const CellAddress reader{sheet.name, pos.col, pos.row};
            std::set<CellAddress> targets;
            for (const auto& r : direct_refs(*f->ast)) targets.insert(r.resolve(sheet.name));
            if (const auto* range = std::get_if<RangeNode>(&f->ast->node)) (void)range;
            for (const auto& t : targets) {
                if (t == reader || t.sheet != sheet.name) continue;
                const auto* tc = sheet.find(t.pos());
                if (!tc || !tc->formula()) continue;
                // Only direct single-cell references guarantee the reader depends on the target.
                bool direct = false;
                for_each_ref(*f->ast, [&](const CellRef& r) { direct = direct || r.resolve(sheet.name) == t; });
                if (!direct) continue;
                (in_runs.count(t) ? fallback : preferred).emplace_back(t, reader);
            }
        }
    }
    const auto& pool = preferred.empty() ? fallback : preferred;
    if (pool.empty()) throw NoAdmissibleSite(DefectKind::Circular);

    const auto [target, reader] = rng.pick(pool);
    const auto before = build_dependency_graph(wb).cycle_set;
    Injection out{wb, {wb.name, DefectKind::Circular, target.sheet, {}}};
    const auto* f = wb.find_cell(target)->formula();
    set_formula(out.workbook, target, make_binary(BinaryOp::Add, f->ast, ref(reader.col, reader.row)));

    std::set<CellAddress> cycle;
    for (const auto& a : build_dependency_graph(out.workbook).cycle_set)
        if (!before.count(a) && a.sheet == target.sheet) cycle.insert(a);
    cycle.insert(target);
    cycle.insert(reader);
    out.defect.region = join_cells(cycle);
    return out;
}

Injection inject_hardcoded(const Workbook& wb, Rng& rng) {
    std::vector<CellAddress> preferred, fallback;
    std::set<CellAddress> already;
    for (const auto& f : detect_hardcoded(wb)) already.insert(CellAddress{f.location.sheet, f.location.cell->col, f.location.cell->row});
    for (const auto& sheet : wb.sheets) {
        const auto in_runs = cells_in_runs(sheet, 4);
        for (const auto& [pos, cell] : sheet.cells) {
            const auto* f = cell.formula();
            const CellAddress at{sheet.name, pos.col, pos.row};
            if (!f || direct_refs(*f->ast).empty() || already.count(at) || wb.has_annotation(at)) continue;
            (in_runs.count(at) ? fallback : preferred).push_back(at);
        }
    }
    const auto& pool = preferred.empty() ? fallback : preferred;
    if (pool.empty()) throw NoAdmissibleSite(DefectKind::Hardcoded);

    const auto at = rng.pick(pool);
    const double literal = kLiterals[rng.below(std::size(kLiterals))];
    Injection out{wb, {wb.name, DefectKind::Hardcoded, at.sheet, a1(at.col, at.row)}};
    set_formula(out.workbook, at, make_binary(BinaryOp::Mul, wb.find_cell(at)->formula()->ast, make_number(literal)));
    return out;
}

Injection inject_inconsistent(const Workbook& wb, Rng& rng) {
    std::vector<CellAddress> sites;
    for (const auto& sheet : wb.sheets)
        for (const auto& run : homogeneous_runs(sheet, 4))
            for (const auto& p : run) sites.push_back(CellAddress{sheet.name, p.col, p.row});
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    rng.shuffle(sites);

    for (const auto& at : sites) {
        const auto& ast = wb.find_cell(at)->formula()->ast;
        if (direct_refs(*ast).empty()) continue;
        // Classic copy-paste slip: the first reference points one row off.
        bool shifted = false;
        auto moved = map_refs(ast, [&](const CellRef& r) {
            if (shifted) return r;
            shifted = true;
            return CellRef{r.sheet, r.col, r.row < kMaxRows ? r.row + 1 : r.row - 1};
        });
        Injection out{wb, {wb.name, DefectKind::Inconsistent, at.sheet, a1(at.col, at.row)}};
        set_formula(out.workbook, at, moved);
        if (build_dependency_graph(out.workbook).cycle_set.size() != build_dependency_graph(wb).cycle_set.size())
            continue;
        return out;
    }
    throw NoAdmissibleSite(DefectKind::Inconsistent);
}

}  // namespace

Injection inject_error(const Workbook& wb, DefectKind kind, Rng& rng) {
    switch (kind) {
        case DefectKind::Hidden: return inject_hidden(wb, rng);
        case DefectKind::Circular: return inject_circular(wb, rng);
        case DefectKind::Hardcoded: return inject_hardcoded(wb, rng);
        case DefectKind::Inconsistent: return inject_inconsistent(wb, rng);
    }
    throw NoAdmissibleSite(kind);
}

// ---------------------------------------------------------------------------

Corpus generate(const CorpusSpec& spec) {
    spec.validate();
    Corpus corpus;
    const int width = std::max<int>(4, static_cast<int>(std::to_string(spec.n - 1).size()));
    for (int i = 0; i < spec.n; ++i) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
        auto index = std::to_string(i);
        const auto name = "wb_" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(width, index.size()), '0') + index;

        GeneratedWorkbook g;
        g.large = rng.bernoulli(spec.size_mix);
        g.workbook = generate_clean(rng, name, g.large, spec.macro_rate);
        g.has_macros = !g.workbook.macros.empty();

        std::vector<DefectKind> kinds;
        if (!spec.rates.empty()) {
            for (auto k : kAllKinds) {
                auto it = spec.rates.find(k);
                if (it != spec.rates.end() && rng.bernoulli(it->second)) kinds.push_back(k);
            }
        } else if (rng.bernoulli(g.large ? spec.large_defect_rate : spec.small_defect_rate)) {
            kinds.push_back(kAllKinds[rng.below(std::size(kAllKinds))]);
        }
        for (auto k : kinds) {
            auto injected = inject_error(g.workbook, k, rng);
            g.workbook = std::move(injected.workbook);
            g.defects.push_back(std::move(injected.defect));
        }
        corpus.truth[name] = g.defects;
        corpus.workbooks.push_back(std::move(g));
    }
    return corpus;
}

bool matches(const Defect& d, std::string_view workbook, const Finding& f) {
    if (d.workbook != workbook || f.detector != to_string(d.kind) || f.location.sheet != d.sheet) return false;
    const auto region = finding_region(f);
    std::string_view rest = d.region;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        if (rest.substr(0, comma) == region) return true;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return false;
}

namespace {

template <class Items, class Workbook, class FindingOf>
std::map<DefectKind, KindScore> score_impl(const Items& items, Workbook workbook_of, FindingOf finding_of,
                                           const GroundTruth& truth) {
    std::map<DefectKind, KindScore> scores;
    for (auto k : kAllKinds) scores[k];
    std::set<std::pair<std::string, std::size_t>> matched_truth;

    for (const auto& item : items) {
        const std::string& wb = workbook_of(item);
        const Finding& f = finding_of(item);
        const auto kind = parse_defect_kind(f.detector);
        if (!kind) continue;
        auto& s = scores[*kind];
        ++s.findings;
        bool hit = false;
        if (auto it = truth.find(wb); it != truth.end()) {
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                if (matches(it->second[i], wb, f)) {
                    hit = true;
                    matched_truth.emplace(wb, i);
                }
            }
        }
        s.matched_findings += hit;
    }
    for (const auto& [wb, defects] : truth) {
        for (std::size_t i = 0; i < defects.size(); ++i) {
            auto& s = scores[defects[i].kind];
            ++s.truth;
            s.matched_truth += matched_truth.count({wb, i});
        }
    }
    for (auto& [_, s] : scores) {
        s.precision = s.findings ? static_cast<double>(s.matched_findings) / static_cast<double>(s.findings) : 1.0;
        s.recall = s.truth ? static_cast<double>(s.matched_truth) / static_cast<double>(s.truth) : 1.0;
    }
    return scores;
}

}  // namespace

std::map<DefectKind, KindScore> score_detectors(const std::vector<AuditResult>& audits, const GroundTruth& truth) {
    std::vector<std::pair<const std::string*, const Finding*>> items;
    for (const auto& a : audits)
        for (const auto& f : a.findings) items.emplace_back(&a.workbook, &f);
    return score_impl(
        items, [](const auto& p) -> const std::string& { return *p.first; },
        [](const auto& p) -> const Finding& { return *p.second; }, truth);
}

std::map<DefectKind, KindScore> score_detectors(const std::vector<ParsedFinding>& findings, const GroundTruth& truth) {
    return score_impl(
        findings, [](const ParsedFinding& p) -> const std::string& { return p.workbook; },
        [](const ParsedFinding& p) -> const Finding& { return p.finding; }, truth);
}

std::string ground_truth_text(const GroundTruth& truth) {
    std::ostringstream out;
    for (const auto& [wb, defects] : truth)
        for (const auto& d : defects) out << wb << '\t' << to_string(d.kind) << '\t' << d.sheet << '\t' << d.region << '\n';
    return out.str();
}

GroundTruth parse_ground_truth(std::string_view text) {
    GroundTruth truth;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        const auto kind = fields.size() == 4 ? parse_defect_kind(fields[1]) : std::nullopt;
        if (!kind) throw ConfigError("ground truth line " + std::to_string(line_no) + ": expected workbook, kind, sheet, region");
        truth[fields[0]].push_back(Defect{fields[0], *kind, fields[2], fields[3]});
    }
    return truth;
}

std::filesystem::path write_corpus(const Corpus& corpus, const CorpusSpec& spec, const std::filesystem::path& dir) {
    const auto root = dir / spec.name;
    std::filesystem::create_directories(root);
    for (const auto& g : corpus.workbooks)
        write_text_file(root / (g.workbook.name + std::string(kWorkbookExtension)), serialize_workbook(g.workbook));
    write_text_file(root / kGroundTruthFile, ground_truth_text(corpus.truth));
    return root;
}

}  // namespace sheetwarden::corpus
