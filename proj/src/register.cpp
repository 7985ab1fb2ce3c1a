#include "sheetwarden/register.hpp"

#include <algorithm>
#include <sstream>

namespace sheetwarden {

std::string_view to_string(RiskStatus s) {
    switch (s) {
        case RiskStatus::Latent: return "Latent";
        case RiskStatus::Aware: return "Aware";
        case RiskStatus::Identified: return "Identified";
        case RiskStatus::Categorised: return "Categorised";
        case RiskStatus::StrategyAssigned: return "StrategyAssigned";
        case RiskStatus::Implemented: return "Implemented";
        case RiskStatus::Monitored: return "Monitored";
    }
    return "?";
}

std::string_view to_string(RiskEventKind k) {
    switch (k) {
        case RiskEventKind::RaiseAwareness: return "raise_awareness";
        case RiskEventKind::Identify: return "identify";
        case RiskEventKind::Categorise: return "categorise";
        case RiskEventKind::AssignStrategy: return "assign_strategy";
        case RiskEventKind::Implement: return "implement";
        case RiskEventKind::Monitor: return "monitor";
        case RiskEventKind::Reassess: return "reassess";
    }
    return "?";
}

std::optional<RiskStatus> legal_transition(RiskStatus from, RiskEventKind event) {
    using S = RiskStatus;
    using E = RiskEventKind;
    switch (event) {
        case E::RaiseAwareness: return from == S::Latent ? std::optional(S::Aware) : std::nullopt;
        case E::Identify: return from == S::Aware ? std::optional(S::Identified) : std::nullopt;
        case E::Categorise: return from == S::Identified ? std::optional(S::Categorised) : std::nullopt;
        case E::AssignStrategy: return from == S::Categorised ? std::optional(S::StrategyAssigned) : std::nullopt;
        case E::Implement: return from == S::StrategyAssigned ? std::optional(S::Implemented) : std::nullopt;
        case E::Monitor: return from == S::Implemented ? std::optional(S::Monitored) : std::nullopt;
        case E::Reassess: return from == S::Monitored ? std::optional(S::Identified) : std::nullopt;
    }
    return std::nullopt;
}

namespace {

bool ever_aware(const RiskEntry& e) {
    return std::any_of(e.history.begin(), e.history.end(),
                       [](const StatusChange& c) { return c.to == RiskStatus::Aware; });
}

}  // namespace

RiskEntry advance(const RiskEntry& entry, const RiskEvent& event, std::uint64_t tick) {
    const auto to = legal_transition(entry.status, event.kind);
    if (!to) throw IllegalTransition(entry.status, event.kind);
    if (event.kind == RiskEventKind::AssignStrategy && (!ever_aware(entry) || event.strategy.empty()))
        throw IllegalTransition(entry.status, event.kind);

    RiskEntry next = entry;
    next.history.push_back(StatusChange{tick, entry.status, *to});
    next.status = *to;
    if (event.kind == RiskEventKind::AssignStrategy) next.strategy = event.strategy;
    if (event.kind == RiskEventKind::Reassess) next.strategy.reset();
    return next;
}

RiskEntry bootstrap_entry(std::string id, std::string category, std::string description, std::uint64_t tick) {
    RiskEntry e{std::move(id), std::move(category), std::move(description), RiskStatus::Latent, std::nullopt, {}};
    e = advance(e, RiskEvent::raise_awareness(), tick);
    return advance(e, RiskEvent::identify(), tick);
}

bool history_replays(const RiskEntry& entry) {
    RiskStatus s = RiskStatus::Latent;
    for (const auto& change : entry.history) {
        if (change.from != s) return false;
        bool legal = false;
        for (auto k : {RiskEventKind::RaiseAwareness, RiskEventKind::Identify, RiskEventKind::Categorise,
                       RiskEventKind::AssignStrategy, RiskEventKind::Implement, RiskEventKind::Monitor,
                       RiskEventKind::Reassess})
            legal = legal || legal_transition(s, k) == change.to;
        if (!legal) return false;
        s = change.to;
    }
    return s == entry.status;
}

StrategyPolicy StrategyPolicy::defaults() {
    StrategyPolicy p;
    p.by_category = {
        {"hidden", "unhide+report"},
        {"hardcoded", "annotate+report"},
    };
    p.fallback = "report-only";
    return p;
}

std::string strategy_for_category(std::string_view category, const StrategyPolicy& policy) {
    if (auto it = policy.by_category.find(std::string(category)); it != policy.by_category.end()) return it->second;
    if (!policy.fallback) throw NoDefaultConfigured(std::string(category));
    return *policy.fallback;
}

const RiskEntry* RiskRegister::find(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

const RiskEntry& RiskRegister::ensure(const std::string& id, const std::string& category,
                                      const std::string& description, std::uint64_t tick) {
    auto it = entries_.find(id);
    if (it == entries_.end()) it = entries_.emplace(id, bootstrap_entry(id, category, description, tick)).first;
    return it->second;
}

const RiskEntry& RiskRegister::apply(const std::string& id, const RiskEvent& event, std::uint64_t tick) {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw std::out_of_range("no risk entry '" + id + "'");
    it->second = advance(it->second, event, tick);
    return it->second;
}

std::string RiskRegister::export_text() const {
    std::ostringstream out;
    for (const auto& [id, e] : entries_) {
        const auto last = e.history.empty() ? std::uint64_t{0} : e.history.back().tick;
        out << id << '\t' << e.category << '\t' << to_string(e.status) << '\t' << e.strategy.value_or("-") << '\t'
            << last << '\n';
    }
    return out.str();
}

}  // namespace sheetwarden
