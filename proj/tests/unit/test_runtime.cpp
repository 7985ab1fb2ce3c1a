#include "scratch.hpp"

#include "sheetwarden/corpus.hpp"
#include "sheetwarden/keyvalue.hpp"
#include "sheetwarden/runtime.hpp"
#include "sheetwarden/workbook_io.hpp"

#include <doctest.h>

#include <fstream>

using namespace sheetwarden;
using namespace sheetwarden::mas;
using acl::Performative;

namespace {

void touch(const std::filesystem::path& p, const std::string& text = "") {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

/// Writes `n` clean workbooks into `dir` and returns their paths relative to `base`.
std::vector<std::string> clean_tree(const std::filesystem::path& dir, int n, std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const auto wb = corpus::generate_clean(rng, "wb" + std::to_string(i), false, 0);
        touch(dir / ("wb" + std::to_string(i) + ".sheet"), serialize_workbook(wb));
    }
    return discover_workbooks(dir, dir.parent_path());
}

std::vector<Message> decoded(const std::vector<std::string>& lines, std::size_t from = 0) {
    std::vector<Message> out;
    for (std::size_t i = from; i < lines.size(); ++i) out.push_back(acl::decode(lines[i]));
    return out;
}

std::vector<Message> informs(const std::vector<Message>& inbox) {
    std::vector<Message> out;
    for (const auto& m : inbox)
        if (m.performative == Performative::Inform) out.push_back(m);
    return out;
}

std::size_t count(const std::vector<Message>& ms, Performative p) {
    return std::count_if(ms.begin(), ms.end(), [p](const Message& m) { return m.performative == p; });
}

SimConfig quiet(int agents) {
    SimConfig c;
    c.agents = agents;
    return c;
}

}  // namespace

TEST_CASE("agent typology") {
    CHECK(classify_agent_type({true, true, true}) == "smart");
    CHECK(classify_agent_type({true, false, false}) == "autonomous");
    CHECK(classify_agent_type({false, true, true}) == "collaborative-learning");
    CHECK(classify_agent_type({true, true, false}) == "collaborative");
    CHECK(classify_agent_type({true, false, true}) == "interface");
    CHECK_THROWS_AS(classify_agent_type({false, false, false}), std::invalid_argument);
    CHECK(parse_capabilities("cooperative, learning") == Capabilities{false, true, true});
    CHECK_THROWS_AS(parse_capabilities("sneaky"), ConfigError);
}

TEST_CASE("workbook discovery") {
    oracle::ScratchDir dir("discover");
    CHECK(discover_workbooks(dir.path()).empty());
    touch(dir / "b/deep/z.sheet");
    touch(dir / "a.sheet");
    touch(dir / "b/m.sheet");
    touch(dir / "b/notes.txt");
    touch(dir / "b/deep/data.csv");
    CHECK(discover_workbooks(dir.path(), dir.path()) == std::vector<std::string>{"a.sheet", "b/deep/z.sheet", "b/m.sheet"});
    CHECK_THROWS_AS(discover_workbooks(dir / "missing"), RootUnreadable);
    CHECK_THROWS_AS(discover_workbooks(dir / "a.sheet"), RootUnreadable);
}

TEST_CASE("proactive scan records new locations once") {
    oracle::ScratchDir dir("scan");
    clean_tree(dir / "root", 3, 1);
    auto c = quiet(1);
    c.scan_roots = {dir / "root"};
    c.base_dir = dir.path();
    World w(c);
    CHECK(w.proactive_scan(1, dir / "root").size() == 3);
    CHECK(w.ledger().entries().size() == 3);
    for (const auto& [_, e] : w.ledger().entries()) CHECK_FALSE(e.last_audit);
    CHECK_THROWS_AS(w.proactive_scan(1, dir / "elsewhere"), std::invalid_argument);
}

TEST_CASE("delegation counts") {
    const std::vector<std::string> ten{"l0", "l1", "l2", "l3", "l4", "l5", "l6", "l7", "l8", "l9"};

    World all_idle(quiet(10));
    auto a = all_idle.distribute_work(1, ten);
    CHECK(a.kept == "l0");
    CHECK(a.delegated.size() == 9);
    CHECK(a.queued.empty());
    std::set<AgentId> peers;
    for (const auto& [p, _] : a.delegated) peers.insert(p);
    CHECK(peers.size() == 9);
    CHECK(count(decoded(all_idle.trace()), Performative::Delegate) == 9);

    World lone(quiet(10));
    CHECK(lone.distribute_work(1, {"only"}).delegated.empty());
    CHECK(lone.trace().empty());

    World few(quiet(5));
    auto b = few.distribute_work(1, ten);
    CHECK(b.delegated.size() == 4);
    CHECK(b.queued.size() == 5);
    CHECK(few.agent(1).pending.size() == 5);
}

TEST_CASE("reserved peers are not delegated to twice") {
    World w(quiet(3));
    CHECK(w.distribute_work(1, {"a", "b", "c"}).delegated.size() == 2);
    auto again = w.distribute_work(1, {"d", "e"});
    CHECK(again.delegated.empty());
    CHECK(again.queued.size() == 1);
}

TEST_CASE("queued work drains as peers free up") {
    oracle::ScratchDir dir("drain");
    auto locs = clean_tree(dir / "root", 10, 2);
    auto c = quiet(3);
    c.scan_roots = {dir / "root"};
    c.base_dir = dir.path();
    c.audit_interval = 100000;
    World w(c);
    w.run(20);
    std::set<std::string> audited;
    for (const auto& r : w.audit_log()) audited.insert(r.location);
    CHECK(audited == std::set<std::string>(locs.begin(), locs.end()));
    CHECK(w.audit_log().size() == 10);
    CHECK(w.engaged_delegations() == 0);
    for (const auto& m : decoded(w.trace()))
        if (m.performative == Performative::Delegate) CHECK(m.sender == 1);
}

TEST_CASE("query answered by a peer, then from the cache") {
    oracle::ScratchDir dir("query");
    clean_tree(dir / "r1", 1, 3);
    auto c = quiet(3);
    c.scan_roots = {dir / "empty1", dir / "r1", dir / "empty2"};
    std::filesystem::create_directories(dir / "empty1");
    std::filesystem::create_directories(dir / "empty2");
    c.base_dir = dir.path();
    World w(c);
    w.tick();  // agent 2 scans its root

    const auto start = w.trace().size();
    w.submit_query(1, "where:wb0");
    w.run(5);
    const auto first = decoded(w.trace(), start);
    std::size_t fan_out = 0, peer_informs = 0;
    for (const auto& m : first) {
        fan_out += m.performative == Performative::Query && m.sender == 1;
        peer_informs += m.performative == Performative::Inform && m.receiver == 1;
    }
    CHECK(fan_out == 2);
    CHECK(peer_informs >= 1);
    REQUIRE(informs(w.client_inbox()).size() == 1);
    CHECK(std::get<acl::Answer>(informs(w.client_inbox())[0].payload).answer == "r1/wb0.sheet");
    const auto* learned = w.agent(1).knowledge.find("where:wb0");
    REQUIRE(learned);
    CHECK(learned->learned_from == AgentId{2});

    const auto again = w.trace().size();
    w.submit_query(1, "where:wb0");
    w.tick();
    const auto second = decoded(w.trace(), again);
    CHECK(count(second, Performative::Query) == 1);  // the client's own query
    CHECK(count(second, Performative::Inform) == 1);
    CHECK(informs(w.client_inbox()).size() == 1);
    w.tick();
    CHECK(informs(w.client_inbox()).size() == 2);
}

TEST_CASE("unknown key times out with a null answer") {
    World w(quiet(3));
    w.submit_query(2, "where:nothing");
    w.run(10);
    REQUIRE(w.client_inbox().size() == 1);
    CHECK_FALSE(std::get<acl::Answer>(w.client_inbox()[0].payload).answer);
    CHECK(w.agent(2).knowledge.size() == 0);
}

TEST_CASE("an empty world only advances its clock") {
    World w(quiet(0));
    w.run(3);
    CHECK(w.clock() == 3);
    CHECK(w.trace().empty());
    CHECK(w.ledger().entries().empty());
}

TEST_CASE("a lone agent audits a stale entry in the next tick") {
    oracle::ScratchDir dir("lone");
    clean_tree(dir / "root", 1, 4);
    auto c = quiet(1);
    c.scan_roots = {dir / "root"};
    c.base_dir = dir.path();
    c.scan_interval = 1000;
    c.audit_interval = 5;
    World w(c);
    w.tick();
    const auto& [loc, e] = *w.ledger().entries().begin();
    CHECK(e.last_audit == std::optional<std::uint64_t>(1));
    w.run(5);
    CHECK(w.ledger().find(loc)->last_audit == std::optional<std::uint64_t>(6));
}

TEST_CASE("client requests are audited and reported") {
    oracle::ScratchDir dir("request");
    Rng rng(8);
    auto wb = corpus::generate_clean(rng, "hid", false, 0);
    wb.sheets[0].hidden_rows.insert(3);
    touch(dir / "hid.sheet", serialize_workbook(wb));
    auto c = quiet(2);
    c.base_dir = dir.path();
    World w(c);
    w.submit_request(2, "hid.sheet");
    w.run(3);
    CHECK(w.audit_log().size() == 1);
    CHECK(w.outbox().size() == 1);
    CHECK(w.risk_register().find("hid.sheet#hidden"));
    std::size_t reports = 0;
    for (const auto& m : w.client_inbox()) reports += m.performative == Performative::Report;
    CHECK(reports == 1);
}

TEST_CASE("unreadable workbooks are logged, not fatal") {
    oracle::ScratchDir dir("broken");
    touch(dir / "root/bad.sheet", "this is not a workbook\n");
    auto c = quiet(1);
    c.scan_roots = {dir / "root"};
    c.base_dir = dir.path();
    World w(c);
    w.run(2);
    CHECK(w.ledger().find("root/bad.sheet")->risk_class == "unreadable");
}

TEST_CASE("same seed, same trace") {
    oracle::ScratchDir dir("replay");
    corpus::CorpusSpec spec;
    spec.n = 20;
    spec.seed = 5;
    const auto root = corpus::write_corpus(corpus::generate(spec), spec, dir.path());
    auto c = quiet(4);
    c.scan_roots = {root};
    c.base_dir = dir.path();
    c.audit_interval = 15;
    c.drop_rate = 0.1;
    c.queries = {{3, 1, "where:wb_0003"}, {40, 2, "risk:corpus/wb_0001.sheet"}};
    World a(c), b(c);
    a.run(100);
    b.run(100);
    CHECK(a.trace() == b.trace());
    CHECK(a.ledger().snapshot_text() == b.ledger().snapshot_text());
    CHECK(a.risk_register().export_text() == b.risk_register().export_text());
    c.seed = 6;
    World other(c);
    other.run(100);
    CHECK(other.trace() != a.trace());
}

TEST_CASE("rolling audits stay fresh and never double-claim") {
    oracle::ScratchDir dir("fresh");
    corpus::CorpusSpec spec;
    spec.n = 12;
    spec.seed = 9;
    const auto root = corpus::write_corpus(corpus::generate(spec), spec, dir.path());
    auto c = quiet(3);
    c.scan_roots = {root};
    c.base_dir = dir.path();
    c.audit_interval = 8;
    World w(c);
    std::size_t seen = 0;
    for (int t = 0; t < 400; ++t) {
        w.tick();
        if (w.clock() > c.audit_interval) REQUIRE(w.ledger().max_staleness(w.clock()) <= c.audit_interval);
        std::set<std::string> this_tick;
        for (; seen < w.audit_log().size(); ++seen)
            if (w.audit_log()[seen].tick == w.clock()) REQUIRE(this_tick.insert(w.audit_log()[seen].location).second);
    }
    CHECK(w.engaged_delegations() == 0);
}

TEST_CASE("configuration text") {
    const auto c = parse_sim_config(
        "agents=4\naudit_interval=30\nscan_roots=a, b\nqueries=5@2 where:x; 9@1 risk:y\nagent.3=autonomous\n", "/base");
    CHECK(c.agents == 4);
    CHECK(c.scan_roots == std::vector<std::filesystem::path>{"/base/a", "/base/b"});
    REQUIRE(c.queries.size() == 2);
    CHECK(c.queries[1].key == "risk:y");
    CHECK(c.capabilities.at(3) == Capabilities{true, false, false});
    CHECK_THROWS_AS(parse_sim_config("agents=-1\n"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("drop_rate=1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("colour=blue\n"), ConfigError);
}

TEST_CASE("an edited workbook is audited afresh") {
    oracle::ScratchDir dir("edit");
    Rng rng(12);
    auto wb = corpus::generate_clean(rng, "live", false, 0);
    touch(dir / "root/live.sheet", serialize_workbook(wb));
    auto c = quiet(1);
    c.scan_roots = {dir / "root"};
    c.base_dir = dir.path();
    c.audit_interval = 3;
    c.scan_interval = 1000;
    World w(c);
    w.run(4);
    CHECK(w.ledger().find("root/live.sheet")->risk_class != "");
    CHECK(w.outbox().empty());
    CHECK_FALSE(w.risk_register().find("root/live.sheet#hidden"));

    wb.sheets[0].hidden_cols.insert(2);
    touch(dir / "root/live.sheet", serialize_workbook(wb));
    w.run(3);
    CHECK(w.outbox().size() == 1);
    CHECK(w.risk_register().find("root/live.sheet#hidden"));
    w.run(6);
    CHECK(w.outbox().size() == 1);  // the corrected copy stays corrected
}
