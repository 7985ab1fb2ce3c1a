#pragma once

#include "sheetwarden/acl.hpp"
#include "sheetwarden/corrections.hpp"
#include "sheetwarden/detectors.hpp"
#include "sheetwarden/register.hpp"
#include "sheetwarden/risk.hpp"
#include "sheetwarden/rng.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sheetwarden::mas {

using acl::AgentId;
using acl::Message;

/// Delegacy, competency and amenability as switches: autonomous agents claim work on their own,
/// cooperative agents join fan-out and delegation, learning agents keep answers learned from peers.
struct Capabilities {
    bool autonomous = true;
    bool cooperative = true;
    bool learning = true;

    bool any() const { return autonomous || cooperative || learning; }
    friend bool operator==(const Capabilities&, const Capabilities&) = default;
};

/// Typology name for a flag combination. Throws std::invalid_argument when no flag is set.
std::string classify_agent_type(const Capabilities& c);

/// Parses "smart" or a comma list of flag names.
Capabilities parse_capabilities(std::string_view text);

struct Knowledge {
    std::string answer;
    std::optional<AgentId> learned_from;  ///< empty: the agent's own source
    std::uint64_t learned_at = 0;

    friend bool operator==(const Knowledge&, const Knowledge&) = default;
};

class KnowledgeStore {
public:
    const Knowledge* find(std::string_view key) const;
    void store_own(const std::string& key, std::string answer, std::uint64_t tick);
    void store_learned(const std::string& key, std::string answer, AgentId from, std::uint64_t tick);

    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, Knowledge, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, Knowledge, std::less<>> entries_;
};

struct Engagement {
    std::optional<std::uint64_t> task;
    bool idle() const { return !task.has_value(); }
};

struct DelegatedTask {
    std::uint64_t task = 0;
    std::string location;
    AgentId delegator = 0;
};

/// A query this agent is coordinating: fanned out, waiting for peers.
struct Coordination {
    std::string key;
    AgentId requester = 0;
    std::set<AgentId> awaiting;
    std::uint64_t deadline = 0;
};

struct PendingWork {
    std::string location;
    std::uint64_t queued_at = 0;
};

struct Agent {
    AgentId id = 0;
    Capabilities capabilities;
    KnowledgeStore knowledge;
    Engagement engagement;
    std::deque<Message> inbox;
    std::vector<std::filesystem::path> scan_roots;

    std::set<std::string> known_locations;  ///< found by this agent's own scans
    std::deque<std::string> kept;           ///< locations this agent audits itself
    std::deque<PendingWork> pending;        ///< discovered work waiting for an idle peer
    std::optional<DelegatedTask> delegated;
    std::map<std::uint64_t, Coordination> coordinating;  ///< by conversation id
};

struct ScheduledQuery {
    std::uint64_t tick = 0;
    AgentId agent = 1;
    std::string key;
};

struct SimConfig {
    int agents = 10;
    std::uint64_t audit_interval = 1440;  ///< one tick per minute of a day
    std::uint64_t scan_interval = 0;      ///< 0: same as audit_interval
    std::uint64_t latency = 1;
    double drop_rate = 0;
    std::uint64_t seed = 1;
    std::uint32_t max_hops = acl::kDefaultMaxHops;
    std::uint64_t query_timeout = 5;
    std::vector<std::filesystem::path> scan_roots;  ///< root i goes to agent (i mod agents) + 1
    std::filesystem::path base_dir;                 ///< locations are recorded relative to this
    std::map<AgentId, Capabilities> capabilities;   ///< overrides; everyone else is "smart"
    std::vector<ScheduledQuery> queries;

    DetectorConfig detectors;
    RiskWeights weights;
    CorrectionPolicy corrections;
    StrategyPolicy strategies = StrategyPolicy::defaults();

    std::uint64_t effective_scan_interval() const { return scan_interval ? scan_interval : audit_interval; }
    void validate() const;
};

/// Keys: agents, audit_interval, scan_interval, latency, drop_rate, seed, scan_roots (comma list),
/// max_hops, query_timeout, queries ("<tick>@<agent> <key>" items separated by ';'), agent.<id>.
/// Relative scan roots resolve against `config_dir`.
SimConfig parse_sim_config(std::string_view text, const std::filesystem::path& config_dir = {});

class RootUnreadable : public std::runtime_error {
public:
    explicit RootUnreadable(const std::filesystem::path& p)
        : std::runtime_error("scan root unreadable: " + p.string()), path_(p) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Every workbook file under `root`, recursively, in lexicographic order. Paths are relative to
/// `base` when it is non-empty.
std::vector<std::string> discover_workbooks(const std::filesystem::path& root, const std::filesystem::path& base = {});

struct LedgerEntry {
    std::uint64_t first_seen = 0;
    std::optional<std::uint64_t> last_audit;
    std::string risk_class;
    double score = 0;
    std::string owner;
    std::optional<AgentId> auditor;
    bool reserved = false;  ///< handed to a delegate; nobody else may claim it
};

class AuditLedger {
public:
    /// False when the location was already known.
    bool add(const std::string& location, std::uint64_t tick);
    LedgerEntry* find(std::string_view location);
    const LedgerEntry* find(std::string_view location) const;
    const std::map<std::string, LedgerEntry, std::less<>>& entries() const { return entries_; }

    /// Oldest claimable entry: never audited first, then by last audit, ties by path.
    std::optional<std::string> oldest_stale(std::uint64_t clock, std::uint64_t interval) const;

    /// max(clock - last audit); never-audited entries count from first sight.
    std::uint64_t max_staleness(std::uint64_t clock) const;

    /// One line per workbook: path, last tick, risk class, score ("-" when never audited).
    std::string snapshot_text() const;

private:
    std::map<std::string, LedgerEntry, std::less<>> entries_;
};

struct NetworkStats {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
};

/// Deterministic mailbox: a message sent at clock c is delivered at c + latency, ordered by
/// (delivery tick, sender, message id). Drops draw from the seeded stream.
class SimNetwork {
public:
    SimNetwork(std::uint64_t latency, double drop_rate, std::uint64_t seed, std::uint32_t max_hops);

    std::uint64_t clock() const { return clock_; }
    void advance() { ++clock_; }

    /// Assigns the message id, records the wire line and schedules delivery. Returns the id.
    std::uint64_t send(Message m);

    /// Removes and returns every message due at the current clock.
    std::vector<Message> deliver_due();

    std::size_t in_flight() const { return in_flight_.size(); }
    const std::vector<std::string>& trace() const { return trace_; }
    const NetworkStats& stats() const { return stats_; }
    std::uint32_t max_hops() const { return max_hops_; }

private:
    struct Key {
        std::uint64_t deliver_at;
        AgentId sender;
        std::uint64_t id;
        auto operator<=>(const Key&) const = default;
    };

    std::uint64_t latency_;
    double drop_rate_;
    Rng rng_;
    std::uint32_t max_hops_;
    std::uint64_t clock_ = 0;
    std::uint64_t next_id_ = 1;
    std::map<Key, Message> in_flight_;
    std::vector<std::string> trace_;
    NetworkStats stats_;
};

struct Assignments {
    std::optional<std::string> kept;
    std::vector<std::pair<AgentId, std::string>> delegated;
    std::vector<std::string> queued;
};

struct AuditRecord {
    std::uint64_t tick = 0;
    AgentId agent = 0;
    std::string location;
};

struct OutboxItem {
    std::string recipient;
    std::string filename;
    std::string text;
};

/// Roster, network, ledger and register, stepped one logical tick at a time.
class World {
public:
    explicit World(SimConfig config);

    /// Advances the clock, delivers due messages, then steps every agent in ascending id.
    void tick();
    void run(std::uint64_t ticks);

    /// Client query, delivered after the network latency. Returns the conversation id.
    std::uint64_t submit_query(AgentId to, const std::string& key);
    /// Client request to audit a location.
    std::uint64_t submit_request(AgentId to, const std::string& location);

    /// Scans one of the agent's roots and records new locations in the ledger.
    std::vector<std::string> proactive_scan(AgentId agent, const std::filesystem::path& root);

    /// Coordinator keeps the first location and delegates the rest to idle peers; the overflow queues.
    Assignments distribute_work(AgentId coordinator, const std::vector<std::string>& discovered);

    std::uint64_t clock() const { return network_.clock(); }
    const std::vector<Agent>& agents() const { return agents_; }
    const Agent& agent(AgentId id) const { return agents_.at(id - 1); }
    const AuditLedger& ledger() const { return ledger_; }
    const RiskRegister& risk_register() const { return register_; }
    const SimNetwork& network() const { return network_; }
    const std::vector<std::string>& trace() const { return network_.trace(); }
    const std::vector<Message>& client_inbox() const { return client_inbox_; }
    const std::vector<OutboxItem>& outbox() const { return outbox_; }
    const std::vector<AuditRecord>& audit_log() const { return audit_log_; }
    const SimConfig& config() const { return config_; }

    /// Delegates sent to an agent that was Engaged at send time; the protocol keeps this at zero.
    std::uint64_t engaged_delegations() const { return engaged_delegations_; }

    /// Writes trace.jsonl, ledger.txt, register.txt and outbox/<recipient>/ under `dir`.
    void write_artifacts(const std::filesystem::path& dir) const;

private:
    struct Reservation {
        AgentId coordinator = 0;
        std::uint64_t task = 0;
        std::string location;
        std::uint64_t deadline = 0;
    };

    struct Workspace {
        std::string source;
        std::optional<Workbook> workbook;  ///< empty when the source does not parse
        /// Last audit of `workbook`, kept while corrections leave it unchanged.
        std::optional<AuditResult> settled;
        RiskAssessment assessment;
    };

    Agent& mut_agent(AgentId id) { return agents_.at(id - 1); }
    void send(AgentId from, AgentId to, acl::Performative p, std::uint64_t conversation, std::uint32_t hop,
              acl::Payload payload);
    void step(Agent& a);
    void handle(Agent& a, const Message& m);
    void handle_query(Agent& a, const Message& m);
    void handle_inform(Agent& a, const Message& m);
    void handle_delegate(Agent& a, const Message& m);
    void expire(Agent& a);
    void drain_pending(Agent& a);
    void do_work(Agent& a);
    bool available_for_delegation(const Agent& peer, AgentId coordinator) const;
    void delegate(Agent& coordinator, Agent& peer, const std::string& location);
    void release(AgentId peer, bool requeue);
    std::vector<std::string> scan_root(Agent& a, const std::filesystem::path& root, std::vector<std::string>* fresh);
    std::optional<std::string> own_answer(const Agent& a, std::string_view key) const;
    void audit(Agent& a, const std::string& location, AgentId report_to);
    void update_register(const std::string& location, const AuditResult& result, std::uint64_t tick);

    SimConfig config_;
    SimNetwork network_;
    std::vector<Agent> agents_;
    AuditLedger ledger_;
    RiskRegister register_;
    std::map<std::string, int, std::less<>> register_counts_;
    std::map<AgentId, Reservation> reservations_;
    std::map<std::string, Workspace, std::less<>> workspaces_;
    std::vector<Message> client_inbox_;
    std::vector<OutboxItem> outbox_;
    std::vector<AuditRecord> audit_log_;
    std::uint64_t next_conversation_ = 1;
    std::uint64_t next_task_ = 1;
    std::uint64_t engaged_delegations_ = 0;
};

}  // namespace sheetwarden::mas
