#include "oracles.hpp"

#include "sheetwarden/acl.hpp"

#include <doctest.h>

using namespace sheetwarden::acl;

namespace {

CodecErrorKind decode_error(const std::string& line) {
    try {
        decode(line);
    } catch (const CodecError& e) {
        return e.kind();
    }
    FAIL("line decoded: " << line);
    return CodecErrorKind::InvalidMessage;
}

}  // namespace

TEST_CASE("ack carries no payload fields") {
    const auto line = encode(Message{1, 1, 1, 2, Performative::Ack, 0, Empty{}});
    CHECK(line == R"({"v":1,"id":1,"conv":1,"from":1,"to":2,"perf":"Ack","hop":0,"payload":{}})");
}

TEST_CASE("query payload key") {
    const auto line = encode(Message{7, 3, 0, 1, Performative::Query, 0, QueryKey{"where: /finance"}});
    CHECK(line.find(R"("payload":{"query":"where: /finance"})") != std::string::npos);
}

TEST_CASE("payload must suit the performative") {
    CHECK_THROWS_AS(encode(Message{1, 1, 1, 2, Performative::Delegate, 0, QueryKey{"x"}}), CodecError);
    CHECK(payload_matches(Performative::Request, TaskAssignment{}));
    CHECK_FALSE(payload_matches(Performative::Report, Empty{}));
    try {
        encode(Message{1, 1, 1, 2, Performative::Query, 2, QueryKey{"x"}});
        FAIL("hop above the limit encoded");
    } catch (const CodecError& e) {
        CHECK(e.kind() == CodecErrorKind::InvalidMessage);
    }
}

TEST_CASE("decode rejects bad lines") {
    const std::string good = encode(Message{1, 1, 1, 2, Performative::Ack, 0, Empty{}});
    CHECK(decode_error(good.substr(0, good.size() / 2)) == CodecErrorKind::MalformedLine);
    CHECK(decode_error(R"({"v":1,"id":1,"conv":1,"from":1,"to":2,"perf":"Shout","hop":0,"payload":{}})") ==
          CodecErrorKind::UnknownPerformative);
    CHECK(decode_error(R"({"v":1,"id":1,"conv":1,"from":1,"to":2,"perf":"Ack","hop":0,"payload":{"query":"x"}})") ==
          CodecErrorKind::PayloadMismatch);
    CHECK(decode_error(R"({"v":1,"id":1,"conv":1,"from":1,"to":2,"perf":"Ack","hop":0,"payload":{},"extra":1})") ==
          CodecErrorKind::MalformedLine);
    CHECK(decode_error(R"({"v":2,"id":1,"conv":1,"from":1,"to":2,"perf":"Ack","hop":0,"payload":{}})") ==
          CodecErrorKind::MalformedLine);
    CHECK(decode_error(good + "\n" + good) == CodecErrorKind::MalformedLine);
}

TEST_CASE("random messages round trip and encode deterministically") {
    sheetwarden::Rng rng(99);
    for (int i = 0; i < 3000; ++i) {
        const auto m = oracle::random_message(rng);
        const auto line = encode(m);
        REQUIRE(line.find('\n') == std::string::npos);
        REQUIRE(decode(line) == m);
        REQUIRE(encode(decode(line)) == line);
    }
}

TEST_CASE("distinct messages encode to distinct lines") {
    sheetwarden::Rng rng(5);
    std::map<std::string, Message> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto m = oracle::random_message(rng);
        const auto [it, fresh] = seen.emplace(encode(m), m);
        if (!fresh) REQUIRE(it->second == m);
    }
}
