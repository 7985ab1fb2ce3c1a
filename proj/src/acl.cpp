#include "sheetwarden/acl.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace sheetwarden::acl {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 6> kPerformativeNames = {"Query", "Inform", "Request",
                                                                 "Delegate", "Ack", "Report"};

[[noreturn]] void fail(CodecErrorKind kind, const std::string& why) { throw CodecError(kind, why); }

ojson payload_json(const Payload& payload) {
    ojson j = ojson::object();
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, QueryKey>) {
                j["query"] = p.key;
            } else if constexpr (std::is_same_v<P, Answer>) {
                j["key"] = p.key;
                j["answer"] = p.answer ? ojson(*p.answer) : ojson(nullptr);
            } else if constexpr (std::is_same_v<P, TaskAssignment>) {
                j["task"] = p.task;
                j["location"] = p.location;
            } else if constexpr (std::is_same_v<P, AuditSummary>) {
                j["workbook"] = p.workbook;
                j["tick"] = p.tick;
                j["findings"] = p.findings;
                j["class"] = p.risk_class;
                j["score"] = p.score;
            }
        },
        payload);
    return j;
}

void expect_keys(const nlohmann::json& j, std::initializer_list<std::string_view> keys, CodecErrorKind kind,
                 std::string_view what) {
    if (!j.is_object() || j.size() != keys.size()) fail(kind, std::string(what) + ": wrong field set");
    for (auto k : keys)
        if (!j.contains(std::string(k))) fail(kind, std::string(what) + ": missing '" + std::string(k) + "'");
}

std::uint64_t unsigned_field(const nlohmann::json& j, const char* key, CodecErrorKind kind) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) fail(kind, std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string string_field(const nlohmann::json& j, const char* key, CodecErrorKind kind) {
    const auto& v = j.at(key);
    if (!v.is_string()) fail(kind, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

Payload decode_payload(Performative perf, const nlohmann::json& j) {
    constexpr auto kind = CodecErrorKind::PayloadMismatch;
    switch (perf) {
        case Performative::Query:
            expect_keys(j, {"query"}, kind, "Query payload");
            return QueryKey{string_field(j, "query", kind)};
        case Performative::Inform: {
            expect_keys(j, {"key", "answer"}, kind, "Inform payload");
            Answer a{string_field(j, "key", kind), std::nullopt};
            if (!j.at("answer").is_null()) a.answer = string_field(j, "answer", kind);
            return a;
        }
        case Performative::Request:
        case Performative::Delegate:
            expect_keys(j, {"task", "location"}, kind, "task payload");
            return TaskAssignment{unsigned_field(j, "task", kind), string_field(j, "location", kind)};
        case Performative::Report: {
            expect_keys(j, {"workbook", "tick", "findings", "class", "score"}, kind, "Report payload");
            if (!j.at("score").is_number()) fail(kind, "'score' must be a number");
            return AuditSummary{string_field(j, "workbook", kind), unsigned_field(j, "tick", kind),
                                unsigned_field(j, "findings", kind), string_field(j, "class", kind),
                                j.at("score").get<double>()};
        }
        case Performative::Ack:
            expect_keys(j, {}, kind, "Ack payload");
            return Empty{};
    }
    fail(kind, "unreachable");
}

}  // namespace

std::string_view to_string(Performative p) { return kPerformativeNames[static_cast<std::size_t>(p)]; }

std::optional<Performative> parse_performative(std::string_view text) {
    for (std::size_t i = 0; i < kPerformativeNames.size(); ++i)
        if (kPerformativeNames[i] == text) return static_cast<Performative>(i);
    return std::nullopt;
}

bool payload_matches(Performative p, const Payload& payload) {
    switch (p) {
        case Performative::Query: return std::holds_alternative<QueryKey>(payload);
        case Performative::Inform: return std::holds_alternative<Answer>(payload);
        case Performative::Request:
        case Performative::Delegate: return std::holds_alternative<TaskAssignment>(payload);
        case Performative::Report: return std::holds_alternative<AuditSummary>(payload);
        case Performative::Ack: return std::holds_alternative<Empty>(payload);
    }
    return false;
}

std::string encode(const Message& m, std::uint32_t max_hops) {
    if (m.hop > max_hops)
        fail(CodecErrorKind::InvalidMessage, "hop " + std::to_string(m.hop) + " exceeds " + std::to_string(max_hops));
    if (!payload_matches(m.performative, m.payload))
        fail(CodecErrorKind::InvalidMessage,
             "payload is not legal for " + std::string(to_string(m.performative)));
    if (const auto* s = std::get_if<AuditSummary>(&m.payload); s && !std::isfinite(s->score))
        fail(CodecErrorKind::InvalidMessage, "score must be finite");

    ojson j;
    j["v"] = kWireVersion;
    j["id"] = m.id;
    j["conv"] = m.conversation;
    j["from"] = m.sender;
    j["to"] = m.receiver;
    j["perf"] = to_string(m.performative);
    j["hop"] = m.hop;
    j["payload"] = payload_json(m.payload);
    // dump() escapes control characters, so the line never contains a raw newline.
    return j.dump();
}

Message decode(std::string_view line, std::uint32_t max_hops) {
    constexpr auto malformed = CodecErrorKind::MalformedLine;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(malformed, "not a complete JSON object");
    expect_keys(j, {"v", "id", "conv", "from", "to", "perf", "hop", "payload"}, malformed, "message");

    if (unsigned_field(j, "v", malformed) != kWireVersion) fail(malformed, "unsupported wire version");
    Message m;
    m.id = unsigned_field(j, "id", malformed);
    m.conversation = unsigned_field(j, "conv", malformed);
    const auto from = unsigned_field(j, "from", malformed);
    const auto to = unsigned_field(j, "to", malformed);
    const auto hop = unsigned_field(j, "hop", malformed);
    constexpr auto kMaxId = std::numeric_limits<AgentId>::max();
    if (from > kMaxId || to > kMaxId) fail(malformed, "agent id out of range");
    if (hop > max_hops) fail(malformed, "hop exceeds the configured maximum");
    m.sender = static_cast<AgentId>(from);
    m.receiver = static_cast<AgentId>(to);
    m.hop = static_cast<std::uint32_t>(hop);

    const auto perf = parse_performative(string_field(j, "perf", malformed));
    if (!perf) fail(CodecErrorKind::UnknownPerformative, "unknown performative '" + j.at("perf").get<std::string>() + "'");
    m.performative = *perf;
    m.payload = decode_payload(*perf, j.at("payload"));
    return m;
}

}  // namespace sheetwarden::acl
