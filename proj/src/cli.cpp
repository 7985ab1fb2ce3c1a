#include "sheetwarden/cli.hpp"

#include "sheetwarden/corpus.hpp"
#include "sheetwarden/corrections.hpp"
#include "sheetwarden/keyvalue.hpp"
#include "sheetwarden/risk.hpp"
#include "sheetwarden/runtime.hpp"
#include "sheetwarden/workbook_io.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sheetwarden::cli {

namespace {

namespace fs = std::filesystem;

/// Raised for I/O and input problems that should end the command with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::optional<Severity> severity_from_flag(std::string text) {
    for (auto& ch : text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    return parse_severity(text);
}

struct AuditOptions {
    std::string path;
    std::string fail_on;
    std::string weights;
};

int run_audit(const AuditOptions& o, std::ostream& out, std::ostream& err) {
    RiskWeights weights;
    if (!o.weights.empty()) weights = parse_weights(read_text_file(o.weights));

    std::optional<Severity> threshold;
    if (!o.fail_on.empty()) {
        threshold = severity_from_flag(o.fail_on);
        if (!threshold) throw UsageError("unknown severity '" + o.fail_on + "'");
    }

    std::vector<fs::path> files;
    std::error_code ec;
    if (fs::is_directory(o.path, ec)) {
        for (const auto& p : mas::discover_workbooks(o.path)) files.emplace_back(p);
    } else if (fs::exists(o.path, ec)) {
        files.emplace_back(o.path);
    } else {
        throw UsageError("no such file or directory: " + o.path);
    }

    bool tripped = false;
    for (const auto& file : files) {
        const auto wb = load_workbook(file);
        const auto result = run_all(wb, DetectorConfig{});
        for (const auto& f : result.findings) {
            out << to_json_line(wb.name, f) << '\n';
            if (threshold && f.severity >= *threshold) tripped = true;
        }
        const auto risk = classify(extract_variables(wb, result), weights);
        err << wb.name << ": " << to_string(risk.risk_class) << " (score " << format_number(risk.score) << ", "
            << result.findings.size() << " finding" << (result.findings.size() == 1 ? "" : "s") << ")\n";
    }
    return tripped ? kExitFindings : kExitOk;
}

int run_scan(const std::string& root, std::ostream& out) {
    for (const auto& p : mas::discover_workbooks(root)) out << p << '\n';
    return kExitOk;
}

struct SimulateOptions {
    std::optional<int> agents;
    std::uint64_t ticks = 100;
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out = "sim-out";
    int fixture_size = 30;
};

CommandOutcome run_simulate(const SimulateOptions& o, std::ostream& out) {
    std::string config_path = o.config;
    if (config_path.empty())
        if (const char* env = std::getenv(kConfigEnv)) config_path = env;

    mas::SimConfig config;
    if (!config_path.empty()) {
        config = mas::parse_sim_config(read_text_file(config_path), fs::path(config_path).parent_path());
        config.base_dir = fs::path(config_path).parent_path();
    }
    if (o.agents) config.agents = *o.agents;
    if (o.seed) config.seed = *o.seed;

    const fs::path out_dir = o.out;
    CommandOutcome outcome;
    if (config.scan_roots.empty()) {
        // No roots configured: audit a fixture corpus drawn from the same seed.
        corpus::CorpusSpec spec;
        spec.name = "fixture";
        spec.n = o.fixture_size;
        spec.seed = config.seed;
        fs::remove_all(out_dir / spec.name);
        const auto root = corpus::write_corpus(corpus::generate(spec), spec, out_dir);
        config.scan_roots = {root};
        config.base_dir = out_dir;
        outcome.artifacts.push_back(root);
    }
    config.validate();

    mas::World world(std::move(config));
    world.run(o.ticks);
    world.write_artifacts(out_dir);
    for (const char* name : {"trace.jsonl", "ledger.txt", "register.txt", "outbox"}) outcome.artifacts.push_back(out_dir / name);

    out << "ticks " << world.clock() << '\n'
        << "messages " << world.network().stats().sent << " sent, " << world.network().stats().dropped << " dropped\n"
        << "audits " << world.audit_log().size() << '\n'
        << "change reports " << world.outbox().size() << '\n'
        << "artifacts " << out_dir.generic_string() << '\n';
    return outcome;
}

CommandOutcome run_corpus_generate(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
    const auto spec = corpus::parse_corpus_spec(read_text_file(spec_path));
    const auto c = corpus::generate(spec);
    const auto root = corpus::write_corpus(c, spec, out_dir);
    std::size_t defects = 0;
    for (const auto& [_, d] : c.truth) defects += d.size();
    out << root.generic_string() << ": " << c.workbooks.size() << " workbooks, " << defects << " injected defects\n";
    return CommandOutcome{kExitOk, {root, root / corpus::kGroundTruthFile}};
}

int run_corpus_score(const std::string& corpus_dir, const std::string& audits_path, std::ostream& out) {
    const auto truth = corpus::parse_ground_truth(read_text_file(fs::path(corpus_dir) / corpus::kGroundTruthFile));
    std::vector<ParsedFinding> findings;
    std::istringstream in(read_text_file(audits_path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            findings.push_back(parse_finding_line(line));
        } catch (const std::exception& e) {
            throw UsageError(audits_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    const auto scores = corpus::score_detectors(findings, truth);
    out << "kind\tprecision\trecall\tfindings\ttruth\n";
    for (const auto& [kind, s] : scores) {
        out << to_string(kind) << '\t' << std::fixed << std::setprecision(4) << s.precision << '\t' << s.recall << '\t'
            << s.findings << '\t' << s.truth << '\n';
    }
    return kExitOk;
}

int run_report_render(const std::string& path, std::ostream& out) {
    out << render_report(report_from_json(read_text_file(path)));
    return kExitOk;
}

}  // namespace

CommandOutcome run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spreadsheet risk auditing with cooperating agents", "sheetwarden"};
    app.require_subcommand(1);

    AuditOptions audit;
    auto* audit_cmd = app.add_subcommand("audit", "Audit a workbook file or every workbook under a directory");
    audit_cmd->add_option("path", audit.path, "Workbook file (.sheet or .csv) or directory")->required();
    audit_cmd->add_option("--fail-on", audit.fail_on, "Exit 1 when a finding reaches this severity");
    audit_cmd->add_option("--weights", audit.weights, "Risk weights file (key=value)");

    std::string scan_root;
    auto* scan_cmd = app.add_subcommand("scan", "List workbooks found under a directory");
    scan_cmd->add_option("root", scan_root, "Directory to scan")->required();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the agent simulation and write its artifacts");
    sim_cmd->add_option("--agents", sim.agents, "Number of agents")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--ticks", sim.ticks, "Logical ticks to run");
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--config", sim.config, "Simulation config file (default: $SHEETWARDEN_CONFIG)");
    sim_cmd->add_option("--out", sim.out, "Artifact directory")->capture_default_str();
    sim_cmd->add_option("--fixture-size", sim.fixture_size, "Workbooks in the generated fixture when no scan roots are set")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* corpus_cmd = app.add_subcommand("corpus", "Synthetic corpus generation and detector scoring");
    corpus_cmd->require_subcommand(1);
    std::string spec_path, gen_out;
    auto* gen_cmd = corpus_cmd->add_subcommand("generate", "Write a corpus and its ground truth");
    gen_cmd->add_option("--spec", spec_path, "Corpus spec file (key=value)")->required();
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    std::string score_corpus, score_audits;
    auto* score_cmd = corpus_cmd->add_subcommand("score", "Per-kind precision and recall of audit findings");
    score_cmd->add_option("--corpus", score_corpus, "Corpus directory holding the ground truth")->required();
    score_cmd->add_option("--audits", score_audits, "Findings in JSON Lines, as printed by audit")->required();

    auto* report_cmd = app.add_subcommand("report", "Change report rendering");
    report_cmd->require_subcommand(1);
    std::string report_path;
    auto* render_cmd = report_cmd->add_subcommand("render", "Render a change report file as text");
    render_cmd->add_option("changereport", report_path, "Change report (JSON)")->required();

    std::vector<const char*> argv{"sheetwarden"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return {kExitOk, {}};
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return {kExitOk, {}};
    } catch (const CLI::ParseError& e) {
        err << "sheetwarden: " << e.what() << '\n';
        return {kExitUsage, {}};
    }

    try {
        if (audit_cmd->parsed()) return {run_audit(audit, out, err), {}};
        if (scan_cmd->parsed()) return {run_scan(scan_root, out), {}};
        if (sim_cmd->parsed()) return run_simulate(sim, out);
        if (gen_cmd->parsed()) return run_corpus_generate(spec_path, gen_out, out);
        if (score_cmd->parsed()) return {run_corpus_score(score_corpus, score_audits, out), {}};
        if (render_cmd->parsed()) return {run_report_render(report_path, out), {}};
    } catch (const std::exception& e) {
        err << "sheetwarden: " << e.what() << '\n';
        return {kExitUsage, {}};
    }
    err << "sheetwarden: no command\n";
    return {kExitUsage, {}};
}

}  // namespace sheetwarden::cli
