// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "fastresume/rng.hpp"
#include "fastresume/session.hpp"
#include "support.hpp"

using namespace fastresume;
using fastresume::testing::ReferenceWindow;

namespace {

const SocketAddr kClientAddr{make_ip(10, 0, 1, 2), 1234};
const SocketAddr kMovedAddr{make_ip(10, 0, 2, 9), 5678};

Cookie test_cookie(std::uint64_t seed) {
    Rng rng(seed);
    return rng.next_bytes<32>();
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("cookie is deterministic and binds address and nonce") {
    Rng rng(3);
    const ServerSecret secret = ServerSecret::from_rng(rng);
    const Nonce nonce = rng.next_bytes<8>();

    const Cookie cookie = generate_cookie(secret, kClientAddr, nonce);
    CHECK(cookie == generate_cookie(secret, kClientAddr, nonce));
    CHECK(verify_cookie(secret, kClientAddr, nonce, cookie));

    CHECK(!verify_cookie(secret, kMovedAddr, nonce, cookie));
    Nonce other_nonce = nonce;
    other_nonce[0] ^= 1;
    CHECK(!verify_cookie(secret, kClientAddr, other_nonce, cookie));
    Cookie tampered = cookie;
    tampered[31] ^= 1;
    CHECK(!verify_cookie(secret, kClientAddr, nonce, tampered));

    Rng rng2(4);
    const ServerSecret other_secret = ServerSecret::from_rng(rng2);
    CHECK(!verify_cookie(other_secret, kClientAddr, nonce, cookie));
}

TEST_CASE("both roles derive identical session state from one cookie") {
    const Cookie cookie = test_cookie(5);
    Session client(Role::kClient, cookie);
    Session server(Role::kServer, cookie);
    CHECK(client.session_id() == server.session_id());
    CHECK(client.session_id() != 0);

    const WireMessage up = client.protect(MessageType::kData, {1, 2, 3});
    CHECK(up.session_id == client.session_id());
    auto accepted = server.unprotect(up, kClientAddr);
    REQUIRE(accepted.ok());
    CHECK(accepted.value() == std::vector<std::uint8_t>{1, 2, 3});

    const WireMessage down = server.protect(MessageType::kDataAck, {9});
    auto echoed = client.unprotect(down, SocketAddr{make_ip(10, 0, 0, 1), 20000});
    REQUIRE(echoed.ok());
    CHECK(echoed.value() == std::vector<std::uint8_t>{9});
}

TEST_CASE("directional keys reject reflected traffic") {
    const Cookie cookie = test_cookie(6);
    Session client(Role::kClient, cookie);
    Session other_client(Role::kClient, cookie);

    const WireMessage msg = client.protect(MessageType::kData, {1});
    auto reflected = other_client.unprotect(msg, kClientAddr);
    REQUIRE(!reflected.ok());
    CHECK(reflected.error() == UnprotectError::kBadMac);
}

TEST_CASE("unprotect rejects wrong session id, tampering, and replay") {
    const Cookie cookie = test_cookie(7);
    Session client(Role::kClient, cookie);
    Session server(Role::kServer, cookie);

    WireMessage msg = client.protect(MessageType::kData, {4, 5});

    WireMessage wrong_sid = msg;
    wrong_sid.session_id ^= 1;
    CHECK(server.unprotect(wrong_sid, kClientAddr).error() == UnprotectError::kBadSessionId);

    WireMessage tampered = msg;
    tampered.payload[0] ^= 1;
    CHECK(server.unprotect(tampered, kClientAddr).error() == UnprotectError::kBadMac);

    REQUIRE(server.unprotect(msg, kClientAddr).ok());
    CHECK(server.unprotect(msg, kClientAddr).error() == UnprotectError::kReplayed);
}

TEST_CASE("accepted traffic updates the peer address hint") {
    const Cookie cookie = test_cookie(8);
    Session client(Role::kClient, cookie);
    Session server(Role::kServer, cookie);

    REQUIRE(server.unprotect(client.protect(MessageType::kData, {}), kClientAddr).ok());
    CHECK(server.peer_addr_hint() == kClientAddr);

    // The client moves; the very next authenticated message retargets it.
    REQUIRE(server.unprotect(client.protect(MessageType::kData, {}), kMovedAddr).ok());
    CHECK(server.peer_addr_hint() == kMovedAddr);

    // A rejected message must not move the hint.
    WireMessage forged = client.protect(MessageType::kData, {});
    forged.payload.push_back(1);
    CHECK(!server.unprotect(forged, SocketAddr{make_ip(6, 6, 6, 6), 666}).ok());
    CHECK(server.peer_addr_hint() == kMovedAddr);
}

TEST_CASE("replay window matches the set-based reference on random streams") {
    Rng rng(1234);
    int checked = 0;
    for (int stream = 0; stream < 10000; ++stream) {
        ReplayWindow window;
        ReferenceWindow reference;
        std::uint64_t cursor = rng.next_below(4);
        for (int step = 0; step < 48; ++step) {
            // Random walk with occasional long jumps, biased to hover around
            // the window edges where off-by-one bugs live.
            const std::uint64_t dice = rng.next_below(100);
            std::uint64_t seq;
            if (dice < 45) {
                seq = cursor + rng.next_below(4);  // near the frontier
            } else if (dice < 80) {
                const std::uint64_t back = rng.next_below(80);  // straddles 64
                seq = cursor > back ? cursor - back : 0;
            } else {
                cursor += 50 + rng.next_below(200);  // jump ahead
                seq = cursor;
            }
            if (seq > cursor) cursor = seq;
            CAPTURE(stream);
            CAPTURE(seq);
            const bool got = window.check(seq);
            const bool want = reference.check_and_update(seq);
            CHECK(got == want);
            CHECK(window.check_and_update(seq) == want);
            if (want) CHECK(!window.check(seq));  // immediate replay rejected
            ++checked;
        }
    }
    CHECK(checked == 10000 * 48);
}

TEST_CASE("adversarial reorder and duplication never forges or double-accepts") {
    Rng rng(99);
    for (int round = 0; round < 50; ++round) {
        const Cookie cookie = test_cookie(1000 + round);
        Session sender(Role::kClient, cookie);
        Session receiver(Role::kServer, cookie);

        std::map<std::uint64_t, std::vector<std::uint8_t>> produced;
        std::vector<WireMessage> channel;
        for (int i = 0; i < 40; ++i) {
            std::vector<std::uint8_t> payload = {std::uint8_t(i), std::uint8_t(round)};
            WireMessage msg = sender.protect(MessageType::kData, payload);
            produced[msg.seq] = payload;
            channel.push_back(msg);
            if (rng.next_below(2) == 0) channel.push_back(msg);  // duplicate
        }
        // Fisher-Yates with the deterministic rng: adversarial reordering.
        for (std::size_t i = channel.size(); i > 1; --i) {
            const std::size_t j = rng.next_below(i);
            std::swap(channel[i - 1], channel[j]);
        }

        std::set<std::uint64_t> accepted;
        for (const WireMessage& msg : channel) {
            auto r = receiver.unprotect(msg, kClientAddr);
            if (!r.ok()) continue;
            REQUIRE(produced.count(msg.seq) == 1);       // no forgery
            CHECK(r.value() == produced[msg.seq]);       // payload intact
            CHECK(accepted.insert(msg.seq).second);      // no duplicate acceptance
        }
        CHECK(!accepted.empty());
    }
}

TEST_CASE("distinct cookies give distinct session ids") {
    Rng rng(42);
    const ServerSecret secret = ServerSecret::from_rng(rng);
    std::set<std::uint64_t> ids;
    for (int i = 0; i < 10000; ++i) {
        const SocketAddr addr{make_ip(10, 0, std::uint8_t(i >> 8), std::uint8_t(i)), 1234};
        const Nonce nonce = rng.next_bytes<8>();
        const Cookie cookie = generate_cookie(secret, addr, nonce);
        ids.insert(Session(Role::kClient, cookie).session_id());
    }
    CHECK(ids.size() == 10000);
}

}  // TEST_SUITE("session")
