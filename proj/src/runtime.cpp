#include "sheetwarden/runtime.hpp"

#include "sheetwarden/keyvalue.hpp"
#include "sheetwarden/workbook_io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <system_error>
#include <tuple>

namespace sheetwarden::mas {

using acl::Performative;

std::string classify_agent_type(const Capabilities& c) {
    if (!c.any()) throw std::invalid_argument("an agent needs at least one capability");
    if (c.autonomous && c.cooperative && c.learning) return "smart";
    if (c.autonomous && c.cooperative) return "collaborative";
    if (c.autonomous && c.learning) return "interface";
    if (c.cooperative && c.learning) return "collaborative-learning";
    if (c.autonomous) return "autonomous";
    return c.cooperative ? "cooperative" : "learning";
}

Capabilities parse_capabilities(std::string_view text) {
    if (trim(text) == "smart") return {};
    Capabilities c{false, false, false};
    std::istringstream in{std::string(text)};
    std::string flag;
    while (std::getline(in, flag, ',')) {
        const auto name = trim(flag);
        if (name == "autonomous") c.autonomous = true;
        else if (name == "cooperative") c.cooperative = true;
        else if (name == "learning") c.learning = true;
        else throw ConfigError("unknown capability '" + std::string(name) + "'");
    }
    if (!c.any()) throw ConfigError("an agent needs at least one capability");
    return c;
}

const Knowledge* KnowledgeStore::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void KnowledgeStore::store_own(const std::string& key, std::string answer, std::uint64_t tick) {
    entries_[key] = Knowledge{std::move(answer), std::nullopt, tick};
}

void KnowledgeStore::store_learned(const std::string& key, std::string answer, AgentId from, std::uint64_t tick) {
    entries_[key] = Knowledge{std::move(answer), from, tick};
}

// ---------------------------------------------------------------------------
// Configuration

void SimConfig::validate() const {
    if (agents < 0) throw ConfigError("agents must not be negative");
    if (audit_interval < 1) throw ConfigError("audit_interval must be at least 1");
    if (latency < 1) throw ConfigError("latency must be at least 1");
    if (!(drop_rate >= 0 && drop_rate <= 1)) throw ConfigError("drop_rate must lie in [0, 1]");
    for (const auto& [id, caps] : capabilities) {
        if (id < 1 || id > static_cast<AgentId>(agents)) throw ConfigError("capability override for unknown agent " + std::to_string(id));
        if (!caps.any()) throw ConfigError("agent " + std::to_string(id) + " has no capability");
    }
    for (const auto& q : queries)
        if (q.agent < 1 || q.agent > static_cast<AgentId>(agents)) throw ConfigError("query addressed to unknown agent " + std::to_string(q.agent));
    try {
        weights.validate();
    } catch (const InvalidWeights& e) {
        throw ConfigError(e.what());
    }
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, sep)) {
        auto t = trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

ScheduledQuery parse_query(const KeyValue& kv, const std::string& item) {
    // <tick>@<agent> <key>
    const auto at = item.find('@');
    const auto space = item.find(' ');
    if (at == std::string::npos || space == std::string::npos || at > space)
        throw ConfigError("line " + std::to_string(kv.line) + ": query '" + item + "' is not <tick>@<agent> <key>");
    const KeyValue tick{kv.key, item.substr(0, at), kv.line};
    const KeyValue agent{kv.key, item.substr(at + 1, space - at - 1), kv.line};
    ScheduledQuery q;
    q.tick = static_cast<std::uint64_t>(parse_int_value(tick));
    q.agent = static_cast<AgentId>(parse_int_value(agent));
    q.key = std::string(trim(std::string_view(item).substr(space + 1)));
    return q;
}

std::uint64_t non_negative(const KeyValue& kv) {
    const auto v = parse_int_value(kv);
    if (v < 0) throw ConfigError("line " + std::to_string(kv.line) + ": " + kv.key + " must not be negative");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

SimConfig parse_sim_config(std::string_view text, const std::filesystem::path& config_dir) {
    SimConfig c;
    for (const auto& kv : parse_key_values(text)) {
        if (kv.key == "agents") c.agents = static_cast<int>(parse_int_value(kv));
        else if (kv.key == "audit_interval") c.audit_interval = non_negative(kv);
        else if (kv.key == "scan_interval") c.scan_interval = non_negative(kv);
        else if (kv.key == "latency") c.latency = non_negative(kv);
        else if (kv.key == "drop_rate") c.drop_rate = parse_double_value(kv);
        else if (kv.key == "seed") c.seed = non_negative(kv);
        else if (kv.key == "max_hops") c.max_hops = static_cast<std::uint32_t>(non_negative(kv));
        else if (kv.key == "query_timeout") c.query_timeout = non_negative(kv);
        else if (kv.key == "scan_roots") {
            for (const auto& root : split(kv.value, ','))
                c.scan_roots.push_back(std::filesystem::path(root).is_absolute() ? std::filesystem::path(root) : config_dir / root);
        } else if (kv.key == "queries") {
            for (const auto& item : split(kv.value, ';')) c.queries.push_back(parse_query(kv, item));
        } else if (kv.key.rfind("agent.", 0) == 0) {
            const KeyValue id{kv.key, kv.key.substr(6), kv.line};
            c.capabilities[static_cast<AgentId>(non_negative(id))] = parse_capabilities(kv.value);
        } else {
            throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
        }
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Discovery and ledger

std::vector<std::string> discover_workbooks(const std::filesystem::path& root, const std::filesystem::path& base) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec) || ec) throw RootUnreadable(root);
    fs::recursive_directory_iterator it(root, ec), end;
    if (ec) throw RootUnreadable(root);

    const auto abs_base = base.empty() ? fs::path{} : fs::absolute(base).lexically_normal();
    std::vector<std::string> out;
    for (; it != end; it.increment(ec)) {
        if (ec) throw RootUnreadable(root);
        if (!it->is_regular_file(ec) || it->path().extension() != kWorkbookExtension) continue;
        const auto p = abs_base.empty() ? it->path() : fs::absolute(it->path()).lexically_normal().lexically_relative(abs_base);
        out.push_back(p.generic_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool AuditLedger::add(const std::string& location, std::uint64_t tick) {
    return entries_.try_emplace(location, LedgerEntry{tick, std::nullopt, {}, 0, {}, std::nullopt, false}).second;
}

LedgerEntry* AuditLedger::find(std::string_view location) {
    auto it = entries_.find(location);
    return it == entries_.end() ? nullptr : &it->second;
}

const LedgerEntry* AuditLedger::find(std::string_view location) const {
    auto it = entries_.find(location);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> AuditLedger::oldest_stale(std::uint64_t clock, std::uint64_t interval) const {
    const std::string* best = nullptr;
    std::tuple<bool, std::uint64_t> best_key{};
    for (const auto& [path, e] : entries_) {
        if (e.reserved) continue;
        if (e.last_audit && clock - *e.last_audit < interval) continue;
        const std::tuple<bool, std::uint64_t> key{e.last_audit.has_value(), e.last_audit.value_or(0)};
        // Map order already breaks ties by path.
        if (!best || key < best_key) {
            best = &path;
            best_key = key;
        }
    }
    return best ? std::optional(*best) : std::nullopt;
}

std::uint64_t AuditLedger::max_staleness(std::uint64_t clock) const {
    std::uint64_t worst = 0;
    for (const auto& [_, e] : entries_) worst = std::max(worst, clock - e.last_audit.value_or(e.first_seen));
    return worst;
}

std::string AuditLedger::snapshot_text() const {
    std::string out;
    for (const auto& [path, e] : entries_) {
        out += path;
        if (e.last_audit)
            out += "\t" + std::to_string(*e.last_audit) + "\t" + e.risk_class + "\t" + format_number(e.score) + "\n";
        else
            out += "\t-\t-\t-\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Network

SimNetwork::SimNetwork(std::uint64_t latency, double drop_rate, std::uint64_t seed, std::uint32_t max_hops)
    : latency_(latency), drop_rate_(drop_rate), rng_(seed), max_hops_(max_hops) {}

std::uint64_t SimNetwork::send(Message m) {
    m.id = next_id_++;
    trace_.push_back(acl::encode(m, max_hops_));
    ++stats_.sent;
    if (drop_rate_ > 0 && rng_.bernoulli(drop_rate_)) {
        ++stats_.dropped;
        return m.id;
    }
    const Key key{clock_ + latency_, m.sender, m.id};
    in_flight_.emplace(key, std::move(m));
    return key.id;
}

std::vector<Message> SimNetwork::deliver_due() {
    std::vector<Message> due;
    while (!in_flight_.empty() && in_flight_.begin()->first.deliver_at <= clock_) {
        due.push_back(std::move(in_flight_.begin()->second));
        in_flight_.erase(in_flight_.begin());
    }
    stats_.delivered += due.size();
    return due;
}

// ---------------------------------------------------------------------------
// World

World::World(SimConfig config)
    : config_(std::move(config)),
      network_(config_.latency, config_.drop_rate, derive_seed(config_.seed, 0), config_.max_hops) {
    config_.validate();
    for (int i = 1; i <= config_.agents; ++i) {
        Agent a;
        a.id = static_cast<AgentId>(i);
        if (auto it = config_.capabilities.find(a.id); it != config_.capabilities.end()) a.capabilities = it->second;
        agents_.push_back(std::move(a));
    }
    if (!agents_.empty())
        for (std::size_t i = 0; i < config_.scan_roots.size(); ++i)
            agents_[i % agents_.size()].scan_roots.push_back(config_.scan_roots[i]);
}

void World::send(AgentId from, AgentId to, Performative p, std::uint64_t conversation, std::uint32_t hop,
                 acl::Payload payload) {
    network_.send(Message{0, conversation, from, to, p, hop, std::move(payload)});
}

std::uint64_t World::submit_query(AgentId to, const std::string& key) {
    if (to < 1 || to > agents_.size()) throw std::invalid_argument("no agent " + std::to_string(to));
    const auto conv = next_conversation_++;
    send(acl::kClient, to, Performative::Query, conv, 0, acl::QueryKey{key});
    return conv;
}

std::uint64_t World::submit_request(AgentId to, const std::string& location) {
    if (to < 1 || to > agents_.size()) throw std::invalid_argument("no agent " + std::to_string(to));
    const auto conv = next_conversation_++;
    send(acl::kClient, to, Performative::Request, conv, 0, acl::TaskAssignment{next_task_++, location});
    return conv;
}

void World::run(std::uint64_t ticks) {
    for (std::uint64_t i = 0; i < ticks; ++i) tick();
}

void World::tick() {
    network_.advance();
    for (const auto& q : config_.queries)
        if (q.tick == clock()) submit_query(q.agent, q.key);
    for (auto& m : network_.deliver_due()) {
        if (m.receiver == acl::kClient) client_inbox_.push_back(std::move(m));
        else if (m.receiver <= agents_.size()) mut_agent(m.receiver).inbox.push_back(std::move(m));
    }
    for (auto& a : agents_) step(a);
}

void World::step(Agent& a) {
    while (!a.inbox.empty()) {
        const auto m = std::move(a.inbox.front());
        a.inbox.pop_front();
        handle(a, m);
    }
    expire(a);
    drain_pending(a);

    const auto interval = config_.effective_scan_interval();
    if (a.capabilities.autonomous && !a.scan_roots.empty() && (clock() - 1) % interval == 0) {
        std::vector<std::string> fresh;
        for (const auto& root : a.scan_roots) {
            try {
                scan_root(a, root, &fresh);
            } catch (const RootUnreadable&) {
                // An unreadable root is retried on the next scan.
            }
        }
        if (!fresh.empty()) distribute_work(a.id, fresh);
    }
    do_work(a);
}

void World::handle(Agent& a, const Message& m) {
    switch (m.performative) {
        case Performative::Query: handle_query(a, m); break;
        case Performative::Inform: handle_inform(a, m); break;
        case Performative::Delegate: handle_delegate(a, m); break;
        case Performative::Request: {
            const auto& t = std::get<acl::TaskAssignment>(m.payload);
            ledger_.add(t.location, clock());
            if (auto* e = ledger_.find(t.location)) e->reserved = true;
            a.kept.push_back(t.location);
            send(a.id, m.sender, Performative::Ack, m.conversation, m.hop, acl::Empty{});
            break;
        }
        case Performative::Report:
            if (auto it = reservations_.find(m.sender); it != reservations_.end() && it->second.coordinator == a.id)
                release(m.sender, false);
            break;
        case Performative::Ack: break;
    }
}

std::optional<std::string> World::own_answer(const Agent& a, std::string_view key) const {
    if (key.rfind("where:", 0) == 0) {
        const auto name = key.substr(6);
        for (const auto& loc : a.known_locations)
            if (loc == name || std::filesystem::path(loc).stem() == name) return loc;
    } else if (key.rfind("risk:", 0) == 0) {
        const auto* e = ledger_.find(key.substr(5));
        if (e && e->last_audit && e->auditor == a.id) return e->risk_class + " " + format_number(e->score);
    }
    return std::nullopt;
}

void World::handle_query(Agent& a, const Message& m) {
    const auto& key = std::get<acl::QueryKey>(m.payload).key;
    auto reply = [&](std::optional<std::string> answer) {
        send(a.id, m.sender, Performative::Inform, m.conversation, m.hop, acl::Answer{key, std::move(answer)});
    };
    if (const auto* k = a.knowledge.find(key)) return reply(k->answer);
    if (auto own = own_answer(a, key)) {
        a.knowledge.store_own(key, *own, clock());
        return reply(std::move(own));
    }
    // Only the initial recipient coordinates; peers answer from their own stores and stop.
    if (m.hop != 0 || m.hop >= network_.max_hops() || !a.capabilities.cooperative || a.coordinating.count(m.conversation))
        return reply(std::nullopt);

    Coordination c{key, m.sender, {}, clock() + config_.query_timeout};
    for (const auto& peer : agents_)
        if (peer.id != a.id && peer.capabilities.cooperative) c.awaiting.insert(peer.id);
    if (c.awaiting.empty()) return reply(std::nullopt);
    for (auto peer : c.awaiting) send(a.id, peer, Performative::Query, m.conversation, m.hop + 1, acl::QueryKey{key});
    a.coordinating.emplace(m.conversation, std::move(c));
}

void World::handle_inform(Agent& a, const Message& m) {
    const auto& answer = std::get<acl::Answer>(m.payload);
    if (answer.key.rfind("task:", 0) == 0) {
        // A declined delegation: the peer was busy.
        if (auto it = reservations_.find(m.sender); it != reservations_.end() && it->second.coordinator == a.id)
            release(m.sender, true);
        return;
    }
    auto it = a.coordinating.find(m.conversation);
    if (it == a.coordinating.end()) return;  // late reply to a closed conversation
    auto& c = it->second;
    c.awaiting.erase(m.sender);
    if (answer.answer) {
        if (a.capabilities.learning) a.knowledge.store_learned(c.key, *answer.answer, m.sender, clock());
        send(a.id, c.requester, Performative::Inform, m.conversation, 0, acl::Answer{c.key, answer.answer});
        a.coordinating.erase(it);
    } else if (c.awaiting.empty()) {
        send(a.id, c.requester, Performative::Inform, m.conversation, 0, acl::Answer{c.key, std::nullopt});
        a.coordinating.erase(it);
    }
}

void World::handle_delegate(Agent& a, const Message& m) {
    const auto& t = std::get<acl::TaskAssignment>(m.payload);
    if (!a.engagement.idle() || a.delegated) {
        send(a.id, m.sender, Performative::Inform, m.conversation, 0,
             acl::Answer{"task:" + std::to_string(t.task), std::nullopt});
        return;
    }
    a.engagement.task = t.task;
    a.delegated = DelegatedTask{t.task, t.location, m.sender};
    send(a.id, m.sender, Performative::Ack, m.conversation, 0, acl::Empty{});
}

void World::expire(Agent& a) {
    for (auto it = a.coordinating.begin(); it != a.coordinating.end();) {
        if (it->second.deadline > clock()) {
            ++it;
            continue;
        }
        send(a.id, it->second.requester, Performative::Inform, it->first, 0, acl::Answer{it->second.key, std::nullopt});
        it = a.coordinating.erase(it);
    }
    std::vector<AgentId> lapsed;
    for (const auto& [peer, r] : reservations_)
        if (r.coordinator == a.id && r.deadline <= clock()) lapsed.push_back(peer);
    for (auto peer : lapsed) release(peer, true);
}

bool World::available_for_delegation(const Agent& peer, AgentId coordinator) const {
    return peer.id != coordinator && peer.capabilities.cooperative && peer.engagement.idle() && !peer.delegated &&
           !reservations_.count(peer.id);
}

void World::delegate(Agent& coordinator, Agent& peer, const std::string& location) {
    if (!peer.engagement.idle()) ++engaged_delegations_;
    const auto task = next_task_++;
    reservations_[peer.id] = Reservation{coordinator.id, task, location, clock() + 2 * config_.latency + config_.query_timeout};
    if (auto* e = ledger_.find(location)) e->reserved = true;
    send(coordinator.id, peer.id, Performative::Delegate, next_conversation_++, 0, acl::TaskAssignment{task, location});
}

void World::release(AgentId peer, bool requeue) {
    auto it = reservations_.find(peer);
    if (it == reservations_.end()) return;
    const auto r = std::move(it->second);
    reservations_.erase(it);
    if (!requeue) return;
    if (auto* e = ledger_.find(r.location)) e->reserved = false;
    mut_agent(r.coordinator).pending.push_back(PendingWork{r.location, clock()});
}

Assignments World::distribute_work(AgentId coordinator, const std::vector<std::string>& discovered) {
    if (discovered.empty()) throw std::invalid_argument("nothing to distribute");
    auto& a = mut_agent(coordinator);
    Assignments out;
    out.kept = discovered.front();
    a.kept.push_back(discovered.front());
    if (auto* e = ledger_.find(discovered.front())) e->reserved = true;

    for (std::size_t i = 1; i < discovered.size(); ++i) {
        Agent* peer = nullptr;
        if (a.capabilities.cooperative)
            for (auto& p : agents_)
                if (available_for_delegation(p, a.id)) {
                    peer = &p;
                    break;
                }
        if (peer) {
            delegate(a, *peer, discovered[i]);
            out.delegated.emplace_back(peer->id, discovered[i]);
        } else {
            a.pending.push_back(PendingWork{discovered[i], clock()});
            out.queued.push_back(discovered[i]);
        }
    }
    return out;
}

namespace {

/// Work still worth doing: nobody holds it and nobody audited it since it was queued.
bool still_pending(const AuditLedger& ledger, const PendingWork& w) {
    const auto* e = ledger.find(w.location);
    return e && !e->reserved && !(e->last_audit && *e->last_audit >= w.queued_at);
}

}  // namespace

void World::drain_pending(Agent& a) {
    if (!a.capabilities.cooperative) return;
    while (!a.pending.empty()) {
        if (!still_pending(ledger_, a.pending.front())) {
            a.pending.pop_front();
            continue;
        }
        Agent* peer = nullptr;
        for (auto& p : agents_)
            if (available_for_delegation(p, a.id)) {
                peer = &p;
                break;
            }
        if (!peer) break;
        delegate(a, *peer, a.pending.front().location);
        a.pending.pop_front();
    }
}

void World::do_work(Agent& a) {
    if (a.delegated) {
        const auto task = std::move(*a.delegated);
        a.delegated.reset();
        audit(a, task.location, task.delegator);
        a.engagement.task.reset();
        return;
    }
    if (!a.kept.empty()) {
        const auto loc = std::move(a.kept.front());
        a.kept.pop_front();
        audit(a, loc, acl::kClient);
        return;
    }
    while (!a.pending.empty() && !still_pending(ledger_, a.pending.front())) a.pending.pop_front();
    if (!a.pending.empty()) {
        const auto loc = std::move(a.pending.front().location);
        a.pending.pop_front();
        audit(a, loc, acl::kClient);
        return;
    }
    if (!a.capabilities.autonomous) return;
    if (auto loc = ledger_.oldest_stale(clock(), config_.audit_interval)) audit(a, *loc, acl::kClient);
}

std::vector<std::string> World::scan_root(Agent& a, const std::filesystem::path& root, std::vector<std::string>* fresh) {
    auto found = discover_workbooks(root, config_.base_dir);
    for (const auto& loc : found) {
        a.known_locations.insert(loc);
        if (ledger_.add(loc, clock()) && fresh) fresh->push_back(loc);
    }
    return found;
}

std::vector<std::string> World::proactive_scan(AgentId agent, const std::filesystem::path& root) {
    auto& a = mut_agent(agent);
    if (std::find(a.scan_roots.begin(), a.scan_roots.end(), root) == a.scan_roots.end())
        throw std::invalid_argument("root " + root.string() + " is not assigned to agent " + std::to_string(agent));
    return scan_root(a, root, nullptr);
}

void World::audit(Agent& a, const std::string& location, AgentId report_to) {
    const auto now = clock();
    ledger_.add(location, now);
    auto& entry = *ledger_.find(location);

    const auto path = config_.base_dir.empty() ? std::filesystem::path(location) : config_.base_dir / location;
    std::string text;
    bool readable = true;
    try {
        text = read_text_file(path);
    } catch (const std::exception&) {
        readable = false;
    }

    auto ws = workspaces_.find(location);
    if (ws == workspaces_.end() || ws->second.source != text || !readable) {
        Workspace fresh;
        fresh.source = text;
        if (readable) {
            try {
                fresh.workbook = parse_workbook(text, location);
            } catch (const std::exception&) {
            }
        }
        ws = workspaces_.insert_or_assign(location, std::move(fresh)).first;
    }

    acl::AuditSummary summary{location, now, 0, "unreadable", 0};
    if (ws->second.workbook) {
        auto& space = ws->second;
        const auto& wb = *space.workbook;
        AuditResult result;
        RiskAssessment assessment;
        if (space.settled) {
            // Same workbook as last time and nothing left to correct: the audit repeats itself.
            result = *space.settled;
            result.audited_at = now;
            assessment = space.assessment;
        } else {
            result = run_all(wb, config_.detectors, now);
            assessment = classify(extract_variables(wb, result), config_.weights);
            auto corrected = apply_corrections(wb, plan_corrections(result, config_.corrections), now);
            if (corrected.report.corrections.empty()) {
                space.settled = result;
                space.assessment = assessment;
            } else {
                outbox_.push_back(OutboxItem{corrected.report.recipient, report_filename(corrected.report),
                                             report_to_json(corrected.report)});
                space.workbook = std::move(corrected.workbook);
            }
        }
        entry.owner = space.workbook->metadata.owner.value_or(std::string(kDefaultRecipient));
        update_register(location, result, now);
        summary = acl::AuditSummary{location, now, result.findings.size(), std::string(to_string(assessment.risk_class)),
                                    assessment.score};
    }
    entry.last_audit = now;
    entry.risk_class = summary.risk_class;
    entry.score = summary.score;
    entry.auditor = a.id;
    entry.reserved = false;
    audit_log_.push_back(AuditRecord{now, a.id, location});
    send(a.id, report_to, Performative::Report, next_conversation_++, 0, std::move(summary));
}

void World::update_register(const std::string& location, const AuditResult& result, std::uint64_t tick) {
    const auto prefix = location + "#";
    std::set<std::string> categories;
    for (const auto& [cat, n] : result.stats.per_detector)
        if (n > 0) categories.insert(cat);
    for (auto it = register_counts_.lower_bound(prefix); it != register_counts_.end() && it->first.rfind(prefix, 0) == 0; ++it)
        categories.insert(it->first.substr(prefix.size()));

    for (const auto& cat : categories) {
        const auto id = prefix + cat;
        const auto found = result.stats.per_detector.find(cat);
        const int count = found == result.stats.per_detector.end() ? 0 : static_cast<int>(found->second);
        auto progress = [&] {
            register_.apply(id, RiskEvent::categorise(), tick);
            register_.apply(id, RiskEvent::assign_strategy(strategy_for_category(cat, config_.strategies)), tick);
            register_.apply(id, RiskEvent::implement(), tick);
        };
        if (!register_.find(id)) {
            if (count == 0) continue;
            register_.ensure(id, cat, std::to_string(count) + " " + cat + " finding(s) in " + location, tick);
            progress();
        } else {
            const int before = register_counts_[id];
            if (register_.find(id)->status == RiskStatus::Implemented) register_.apply(id, RiskEvent::monitor(), tick);
            if (register_.find(id)->status == RiskStatus::Monitored && count != before)
                register_.apply(id, RiskEvent::reassess(), tick);
            if (register_.find(id)->status == RiskStatus::Identified && count > 0) progress();
        }
        register_counts_[id] = count;
    }
}

namespace {

std::string safe_component(std::string_view name) {
    std::string out;
    for (char ch : name) {
        const auto c = static_cast<unsigned char>(ch);
        out.push_back(std::isalnum(c) || ch == '.' || ch == '-' || ch == '_' ? ch : '_');
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

}  // namespace

void World::write_artifacts(const std::filesystem::path& dir) const {
    std::string trace;
    for (const auto& line : network_.trace()) trace += line + "\n";
    write_text_file(dir / "trace.jsonl", trace);
    write_text_file(dir / "ledger.txt", ledger_.snapshot_text());
    write_text_file(dir / "register.txt", register_.export_text());
    std::filesystem::remove_all(dir / "outbox");
    std::filesystem::create_directories(dir / "outbox");
    for (const auto& item : outbox_) write_text_file(dir / "outbox" / safe_component(item.recipient) / item.filename, item.text);
}

}  // namespace sheetwarden::mas
