#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sheetwarden {

/// Management-cycle stages, in cycle order.
enum class RiskStatus { Latent, Aware, Identified, Categorised, StrategyAssigned, Implemented, Monitored };

std::string_view to_string(RiskStatus s);

enum class RiskEventKind { RaiseAwareness, Identify, Categorise, AssignStrategy, Implement, Monitor, Reassess };

std::string_view to_string(RiskEventKind k);

struct RiskEvent {
    RiskEventKind kind;
    std::string strategy;  ///< only for AssignStrategy

    static RiskEvent raise_awareness() { return {RiskEventKind::RaiseAwareness, {}}; }
    static RiskEvent identify() { return {RiskEventKind::Identify, {}}; }
    static RiskEvent categorise() { return {RiskEventKind::Categorise, {}}; }
    static RiskEvent assign_strategy(std::string name) { return {RiskEventKind::AssignStrategy, std::move(name)}; }
    static RiskEvent implement() { return {RiskEventKind::Implement, {}}; }
    static RiskEvent monitor() { return {RiskEventKind::Monitor, {}}; }
    static RiskEvent reassess() { return {RiskEventKind::Reassess, {}}; }
};

struct StatusChange {
    std::uint64_t tick = 0;
    RiskStatus from;
    RiskStatus to;

    friend bool operator==(const StatusChange&, const StatusChange&) = default;
};

struct RiskEntry {
    std::string id;
    std::string category;
    std::string description;
    RiskStatus status = RiskStatus::Latent;
    std::optional<std::string> strategy;
    std::vector<StatusChange> history;

    friend bool operator==(const RiskEntry&, const RiskEntry&) = default;
};

class IllegalTransition : public std::logic_error {
public:
    IllegalTransition(RiskStatus from, RiskEventKind event)
        : std::logic_error("illegal transition: " + std::string(to_string(event)) + " from " +
                           std::string(to_string(from))),
          from_(from),
          event_(event) {}
    RiskStatus from() const { return from_; }
    RiskEventKind event() const { return event_; }

private:
    RiskStatus from_;
    RiskEventKind event_;
};

/// Target status of the single legal edge for (status, event), if any.
std::optional<RiskStatus> legal_transition(RiskStatus from, RiskEventKind event);

/// Applies one event. No strategy can be assigned to an entry whose history lacks awareness.
RiskEntry advance(const RiskEntry& entry, const RiskEvent& event, std::uint64_t tick);

/// Entry created by the auditing system itself: awareness is granted at bootstrap, status Identified.
RiskEntry bootstrap_entry(std::string id, std::string category, std::string description, std::uint64_t tick);

/// Re-runs the history from Latent; false if any step is not a legal edge or the chain breaks.
bool history_replays(const RiskEntry& entry);

class NoDefaultConfigured : public std::runtime_error {
public:
    explicit NoDefaultConfigured(const std::string& category)
        : std::runtime_error("no strategy for category '" + category + "' and no default configured") {}
};

struct StrategyPolicy {
    std::map<std::string, std::string> by_category;
    std::optional<std::string> fallback;

    static StrategyPolicy defaults();
};

std::string strategy_for_category(std::string_view category, const StrategyPolicy& policy);

/// Single-writer store of entries keyed by id.
class RiskRegister {
public:
    const RiskEntry* find(std::string_view id) const;
    /// Inserts a bootstrapped entry unless the id exists; returns the stored entry.
    const RiskEntry& ensure(const std::string& id, const std::string& category, const std::string& description,
                            std::uint64_t tick);
    const RiskEntry& apply(const std::string& id, const RiskEvent& event, std::uint64_t tick);

    const std::map<std::string, RiskEntry, std::less<>>& entries() const { return entries_; }

    /// One line per entry: id, category, status, strategy, last tick (tab separated).
    std::string export_text() const;

private:
    std::map<std::string, RiskEntry, std::less<>> entries_;
};

}  // namespace sheetwarden
