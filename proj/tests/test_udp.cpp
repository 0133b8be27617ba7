// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Live-socket adapter tests. Everything runs over loopback with wall-clock
// time, so assertions stick to ordering, counts, and completion within a
// generous cap — never exact timings. Port numbers are unique per test case
// to stay independent of execution order.

#include <doctest.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fastresume/client.hpp"
#include "fastresume/server.hpp"
#include "fastresume/udp.hpp"
#include "support.hpp"

using namespace fastresume;
using fastresume::testing::RecordingEndpoint;

namespace {

constexpr std::uint32_t kLoopback = make_ip(127, 0, 0, 1);
constexpr SimTime kCapMs = 20000;  // wall-clock safety net, normally ~ms

struct LiveRig {
    UdpLoop loop;
    HostId server_host;
    HostId client_host;
    std::unique_ptr<ServerEndpoint> server;
    std::unique_ptr<ClientEndpoint> client;
};

std::unique_ptr<LiveRig> make_live_rig(Variant variant, int messages, std::uint16_t port) {
    auto rig = std::make_unique<LiveRig>();
    rig->server_host = rig->loop.add_host("server", kLoopback);
    rig->client_host = rig->loop.add_host("client", kLoopback);

    ServerConfig server_cfg;
    server_cfg.welcome_addr = SocketAddr{kLoopback, port};
    server_cfg.variant = variant;
    server_cfg.port_range_begin = std::uint16_t(port + 100);
    server_cfg.port_range_end = std::uint16_t(port + 199);
    rig->server = std::make_unique<ServerEndpoint>(rig->loop.transport(rig->server_host),
                                                   server_cfg);

    ClientConfig client_cfg;
    client_cfg.server_welcome = server_cfg.welcome_addr;
    client_cfg.variant = variant;
    client_cfg.total_messages = messages;
    client_cfg.local_port = std::uint16_t(port + 1);
    rig->client = std::make_unique<ClientEndpoint>(rig->loop.transport(rig->client_host),
                                                   client_cfg);

    rig->loop.attach(rig->server_host, rig->server.get());
    rig->loop.attach(rig->client_host, rig->client.get());
    rig->server->start();
    rig->client->start();
    return rig;
}

}  // namespace

TEST_SUITE("udp") {

TEST_CASE("every variant completes a workload over loopback sockets") {
    Variant variant = Variant::kBaseline;
    std::uint16_t port = 46100;
    SUBCASE("baseline") {
        variant = Variant::kBaseline;
        port = 46100;
    }
    SUBCASE("ipc") {
        variant = Variant::kIpc;
        port = 46400;
    }
    SUBCASE("tcs") {
        variant = Variant::kTcs;
        port = 46700;
    }

    auto rig = make_live_rig(variant, 25, port);
    const bool completed =
        rig->loop.run_until([&] { return rig->client->done(); }, kCapMs);
    REQUIRE(completed);

    const ClientMetrics& cm = rig->client->metrics();
    CHECK(cm.acked == 25);
    CHECK(cm.handshakes_completed == 1);
    CHECK(cm.handshake_flights_sent_after_establish == 0);
    CHECK(rig->server->metrics().handshake_flights_sent_after_establish == 0);

    if (variant == Variant::kTcs) {
        // The redirect arrives while the first message is in flight, so the
        // client re-targets it at the final socket — same as the simulator.
        CHECK(rig->server->metrics().redirect_transmissions == 1);
        CHECK(cm.data_retransmissions == 1);
        const std::string trace = rig->loop.trace().joined();
        CHECK(trace.find("redirect complete after 1 sends") != std::string::npos);
    } else {
        CHECK(cm.data_retransmissions == 0);
    }
}

TEST_CASE("logical sockets sharing one local address demultiplex by peer") {
    UdpLoop loop;
    const HostId a = loop.add_host("a", kLoopback);
    const HostId b = loop.add_host("b", kLoopback);
    RecordingEndpoint ea(loop.transport(a));
    RecordingEndpoint eb(loop.transport(b));
    loop.attach(a, &ea);
    loop.attach(b, &eb);

    const SocketAddr shared{kLoopback, 46900};
    const SocketAddr peer_b{kLoopback, 46901};
    const SocketAddr other{kLoopback, 46902};
    const SocketId plain = loop.transport(a).open_socket(shared).value();
    const SocketId to_b = loop.transport(a).open_connected(shared, peer_b).value();
    const SocketId from_b = loop.transport(b).open_socket(peer_b).value();
    const SocketId from_other = loop.transport(b).open_socket(other).value();

    REQUIRE(loop.transport(b).send(from_b, shared, {1}).ok());
    REQUIRE(loop.transport(b).send(from_other, shared, {2}).ok());
    REQUIRE(loop.run_until([&] { return ea.rx.size() == 2; }, kCapMs));

    // One OS descriptor, two logical sockets: the connected one wins for its
    // peer, everything else falls back to the unconnected one.
    for (const RecordingEndpoint::Rx& rx : ea.rx) {
        if (rx.src == peer_b) {
            CHECK(rx.sock == to_b);
        } else {
            CHECK(rx.src == other);
            CHECK(rx.sock == plain);
        }
    }
}

TEST_CASE("close and immediate rebind keeps kernel-queued datagrams") {
    UdpLoop loop;
    const HostId a = loop.add_host("a", kLoopback);
    const HostId b = loop.add_host("b", kLoopback);
    RecordingEndpoint ea(loop.transport(a));
    loop.attach(a, &ea);

    const SocketAddr addr_a{kLoopback, 46910};
    const SocketAddr addr_b{kLoopback, 46911};
    const SocketId first = loop.transport(a).open_socket(addr_a).value();
    const SocketId sender = loop.transport(b).open_socket(addr_b).value();

    REQUIRE(loop.transport(b).send(sender, addr_a, {7}).ok());
    // Same close-then-rebind churn the client does when it establishes; the
    // datagram above is already queued for the shared descriptor.
    loop.transport(a).close_socket(first);
    const SocketId second = loop.transport(a).open_connected(addr_a, addr_b).value();
    CHECK(second != first);

    REQUIRE(loop.run_until([&] { return !ea.rx.empty(); }, kCapMs));
    CHECK(ea.rx.front().sock == second);
    CHECK(ea.rx.front().bytes == std::vector<std::uint8_t>{7});
}

TEST_CASE("timers fire in deadline order and honor cancellation") {
    UdpLoop loop;
    const HostId a = loop.add_host("a", kLoopback);
    RecordingEndpoint ea(loop.transport(a));
    loop.attach(a, &ea);

    const TimerId late = loop.transport(a).arm_timer(60);
    const TimerId cancelled = loop.transport(a).arm_timer(30);
    const TimerId early = loop.transport(a).arm_timer(10);
    loop.transport(a).cancel_timer(cancelled);

    REQUIRE(loop.run_until([&] { return ea.timer_fires.size() == 2; }, kCapMs));
    CHECK(ea.timer_fires[0].second == early);
    CHECK(ea.timer_fires[1].second == late);
}

TEST_CASE("the OS enforces address uniqueness across hosts on one loop") {
    UdpLoop loop;
    const HostId a = loop.add_host("a", kLoopback);
    const HostId b = loop.add_host("b", kLoopback);

    const SocketAddr addr{kLoopback, 46920};
    REQUIRE(loop.transport(a).open_socket(addr).ok());
    const auto conflict = loop.transport(b).open_socket(addr);
    REQUIRE(!conflict.ok());
    CHECK(conflict.error() == BindError::kAddressInUse);

    // Within one host the stack itself rejects the double bind.
    const auto same_host = loop.transport(a).open_socket(addr);
    REQUIRE(!same_host.ok());
    CHECK(same_host.error() == BindError::kAddressInUse);
}

}  // TEST_SUITE("udp")
