#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace sheetwarden::acl {

using AgentId = std::uint32_t;

/// The external client that issues queries and receives final answers.
inline constexpr AgentId kClient = 0;

/// Query/Inform exchange information; Request/Delegate command action; Ack and Report close the loop.
enum class Performative { Query, Inform, Request, Delegate, Ack, Report };

std::string_view to_string(Performative p);
std::optional<Performative> parse_performative(std::string_view text);

struct Empty {
    friend bool operator==(const Empty&, const Empty&) = default;
};

struct QueryKey {
    std::string key;
    friend bool operator==(const QueryKey&, const QueryKey&) = default;
};

/// A missing answer means the responder could not resolve the key.
struct Answer {
    std::string key;
    std::optional<std::string> answer;
    friend bool operator==(const Answer&, const Answer&) = default;
};

struct TaskAssignment {
    std::uint64_t task = 0;
    std::string location;
    friend bool operator==(const TaskAssignment&, const TaskAssignment&) = default;
};

struct AuditSummary {
    std::string workbook;
    std::uint64_t tick = 0;
    std::uint64_t findings = 0;
    std::string risk_class;
    double score = 0;
    friend bool operator==(const AuditSummary&, const AuditSummary&) = default;
};

using Payload = std::variant<Empty, QueryKey, Answer, TaskAssignment, AuditSummary>;

struct Message {
    std::uint64_t id = 0;
    std::uint64_t conversation = 0;
    AgentId sender = 0;
    AgentId receiver = 0;
    Performative performative = Performative::Ack;
    std::uint32_t hop = 0;
    Payload payload;

    friend bool operator==(const Message&, const Message&) = default;
};

inline constexpr int kWireVersion = 1;
inline constexpr std::uint32_t kDefaultMaxHops = 1;

/// True when `payload` is the variant the performative carries.
bool payload_matches(Performative p, const Payload& payload);

enum class CodecErrorKind { InvalidMessage, MalformedLine, UnknownPerformative, PayloadMismatch };

class CodecError : public std::runtime_error {
public:
    CodecError(CodecErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    CodecErrorKind kind() const { return kind_; }

private:
    CodecErrorKind kind_;
};

/// One JSON object on one line: v, id, conv, from, to, perf, hop, payload.
std::string encode(const Message& m, std::uint32_t max_hops = kDefaultMaxHops);

Message decode(std::string_view line, std::uint32_t max_hops = kDefaultMaxHops);

}  // namespace sheetwarden::acl
