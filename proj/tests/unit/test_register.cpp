#include "sheetwarden/register.hpp"
#include "sheetwarden/rng.hpp"

#include <doctest.h>

using namespace sheetwarden;

namespace {

bool aware_in_history(const RiskEntry& e) {
    for (const auto& h : e.history)
        if (h.to == RiskStatus::Aware) return true;
    return false;
}

RiskEntry walk(std::initializer_list<RiskEvent> events) {
    RiskEntry e{"r", "hidden", "", RiskStatus::Latent, std::nullopt, {}};
    std::uint64_t t = 0;
    for (const auto& ev : events) e = advance(e, ev, ++t);
    return e;
}

}  // namespace

TEST_CASE("strategy needs awareness") {
    RiskEntry latent{"r", "hidden", "", RiskStatus::Latent, std::nullopt, {}};
    CHECK_THROWS_AS(advance(latent, RiskEvent::assign_strategy("x"), 1), IllegalTransition);
    CHECK(advance(latent, RiskEvent::raise_awareness(), 1).status == RiskStatus::Aware);

    // Forged status without the awareness step is still refused.
    RiskEntry forged{"r", "hidden", "", RiskStatus::Categorised, std::nullopt, {}};
    CHECK_THROWS_AS(advance(forged, RiskEvent::assign_strategy("x"), 1), IllegalTransition);
}

TEST_CASE("the full cycle and reassessment") {
    auto e = walk({RiskEvent::raise_awareness(), RiskEvent::identify(), RiskEvent::categorise(),
                   RiskEvent::assign_strategy("unhide+report"), RiskEvent::implement(), RiskEvent::monitor()});
    CHECK(e.status == RiskStatus::Monitored);
    CHECK(e.strategy == "unhide+report");
    const auto len = e.history.size();
    e = advance(e, RiskEvent::reassess(), 10);
    CHECK(e.status == RiskStatus::Identified);
    CHECK(e.history.size() == len + 1);
    CHECK_FALSE(e.strategy);
    CHECK(history_replays(e));
}

TEST_CASE("exactly seven legal edges") {
    const RiskStatus all_s[] = {RiskStatus::Latent,     RiskStatus::Aware,           RiskStatus::Identified,
                                RiskStatus::Categorised, RiskStatus::StrategyAssigned, RiskStatus::Implemented,
                                RiskStatus::Monitored};
    const RiskEventKind all_e[] = {RiskEventKind::RaiseAwareness, RiskEventKind::Identify, RiskEventKind::Categorise,
                                   RiskEventKind::AssignStrategy, RiskEventKind::Implement, RiskEventKind::Monitor,
                                   RiskEventKind::Reassess};
    int edges = 0;
    for (auto s : all_s)
        for (auto ev : all_e) edges += legal_transition(s, ev).has_value();
    CHECK(edges == 7);
}

TEST_CASE("random event sequences keep the guard and replay") {
    Rng rng(77);
    for (int i = 0; i < 3000; ++i) {
        RiskEntry e = rng.bernoulli(0.2) ? bootstrap_entry("b", "hidden", "", 0)
                                         : RiskEntry{"r", "c", "", RiskStatus::Latent, std::nullopt, {}};
        for (int step = 0; step < 25; ++step) {
            const auto kind = static_cast<RiskEventKind>(rng.below(7));
            RiskEvent ev{kind, kind == RiskEventKind::AssignStrategy && rng.bernoulli(0.8) ? "s" : ""};
            const auto before = e;
            try {
                e = advance(e, ev, static_cast<std::uint64_t>(step + 1));
            } catch (const IllegalTransition&) {
                REQUIRE(e == before);
            }
            REQUIRE((!e.strategy || aware_in_history(e)));
            REQUIRE(e.strategy.has_value() == (e.status >= RiskStatus::StrategyAssigned));
            REQUIRE(history_replays(e));
        }
    }
}

TEST_CASE("strategy lookup") {
    const auto policy = StrategyPolicy::defaults();
    CHECK(strategy_for_category("hidden", policy) == "unhide+report");
    CHECK(strategy_for_category("circular", policy) == "report-only");
    StrategyPolicy bare{{{"hidden", "unhide+report"}}, std::nullopt};
    CHECK_THROWS_AS(strategy_for_category("circular", bare), NoDefaultConfigured);
}

TEST_CASE("register store and export") {
    RiskRegister reg;
    const auto& e = reg.ensure("wb#hidden", "hidden", "2 hidden rows", 4);
    CHECK(e.status == RiskStatus::Identified);
    CHECK(&reg.ensure("wb#hidden", "other", "", 5) == reg.find("wb#hidden"));
    reg.apply("wb#hidden", RiskEvent::categorise(), 6);
    reg.apply("wb#hidden", RiskEvent::assign_strategy("unhide+report"), 6);
    CHECK_THROWS_AS(reg.apply("wb#hidden", RiskEvent::monitor(), 7), IllegalTransition);
    CHECK(reg.export_text() == "wb#hidden\thidden\tStrategyAssigned\tunhide+report\t6\n");
}
