#include "scratch.hpp"

#include "sheetwarden/cli.hpp"
#include "sheetwarden/keyvalue.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace sheetwarden;
using namespace sheetwarden::cli;

namespace {

const std::filesystem::path kData = SHEETWARDEN_TEST_DATA;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const auto outcome = run_command(args, out, err);
    return {outcome.exit_code, out.str(), err.str()};
}

std::string slurp_tree(const std::filesystem::path& dir) {
    std::string all;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.lexically_relative(dir).generic_string() + "\n" + read_text_file(f);
    return all;
}

}  // namespace

TEST_CASE("audit exit codes") {
    auto clean = run({"audit", (kData / "clean.sheet").string()});
    CHECK(clean.code == kExitOk);
    CHECK(clean.out.empty());
    CHECK(clean.err.find("0 findings") != std::string::npos);

    CHECK(run({"audit", (kData / "bad.sheet").string(), "--fail-on", "Error"}).code == kExitFindings);
    CHECK(run({"audit", (kData / "bad.sheet").string(), "--fail-on", "critical"}).code == kExitOk);
    CHECK(run({"audit", (kData / "bad.sheet").string()}).code == kExitOk);
    CHECK(run({"audit", (kData / "bad.sheet").string(), "--fail-on", "Loud"}).code == kExitUsage);
    CHECK(run({"audit", (kData / "missing.sheet").string()}).code == kExitUsage);
}

TEST_CASE("usage errors and help") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"audit"}).code == kExitUsage);
    const auto help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("scan lists workbooks") {
    const auto r = run({"scan", kData.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("bad.sheet") < r.out.find("clean.sheet"));
}

TEST_CASE("corpus generate, audit and score") {
    oracle::ScratchDir dir("cli-corpus");
    write_text_file(dir / "spec.txt", "name=mini\nn=30\nseed=4\nrate.hidden=0.5\nrate.inconsistent=0.5\n");
    auto gen = run({"corpus", "generate", "--spec", (dir / "spec.txt").string(), "--out", dir.path().string()});
    REQUIRE(gen.code == kExitOk);
    auto audit = run({"audit", (dir / "mini").string()});
    REQUIRE(audit.code == kExitOk);
    write_text_file(dir / "findings.jsonl", audit.out);
    auto score = run({"corpus", "score", "--corpus", (dir / "mini").string(), "--audits", (dir / "findings.jsonl").string()});
    REQUIRE(score.code == kExitOk);
    CHECK(score.out.rfind("kind\tprecision\trecall", 0) == 0);
    CHECK(score.out.find("hidden\t1.0000\t1.0000") != std::string::npos);
}

TEST_CASE("simulate is reproducible and its reports render") {
    oracle::ScratchDir dir("cli-sim");
    const auto a = (dir / "a").string(), b = (dir / "b").string();
    for (const auto& out : {a, b})
        REQUIRE(run({"simulate", "--agents", "10", "--ticks", "100", "--seed", "7", "--out", out}).code == kExitOk);
    CHECK(slurp_tree(a) == slurp_tree(b));
    CHECK(!read_text_file(std::filesystem::path(a) / "trace.jsonl").empty());

    std::filesystem::path report;
    for (const auto& e : std::filesystem::recursive_directory_iterator(std::filesystem::path(a) / "outbox"))
        if (e.is_regular_file()) report = e.path();
    REQUIRE(!report.empty());
    const auto rendered = run({"report", "render", report.string()});
    CHECK(rendered.code == kExitOk);
    CHECK(!rendered.out.empty());
}

TEST_CASE("simulate reads the config named by the environment") {
    oracle::ScratchDir dir("cli-env");
    std::filesystem::create_directories(dir / "books");
    std::filesystem::copy_file(kData / "bad.sheet", dir / "books/bad.sheet");
    write_text_file(dir / "sim.conf", "agents=2\nscan_roots=books\naudit_interval=5\n");
    ::setenv(kConfigEnv, (dir / "sim.conf").string().c_str(), 1);
    const auto r = run({"simulate", "--ticks", "12", "--out", (dir / "out").string()});
    ::unsetenv(kConfigEnv);
    REQUIRE(r.code == kExitOk);
    CHECK(read_text_file(dir / "out/ledger.txt").rfind("books/bad.sheet\t", 0) == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "out/fixture"));
}
