// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>
#include <vector>

#include "fastresume/netsim.hpp"
#include "support.hpp"

using namespace fastresume;
using fastresume::testing::RecordingEndpoint;

namespace {

constexpr std::uint32_t kIpA = make_ip(10, 0, 0, 1);
constexpr std::uint32_t kIpB = make_ip(10, 0, 0, 2);
constexpr std::uint32_t kNatIp = make_ip(100, 64, 0, 1);
constexpr std::uint32_t kInternalIp = make_ip(192, 168, 0, 2);
constexpr std::uint32_t kServer1 = make_ip(10, 0, 0, 1);
constexpr std::uint32_t kServer2 = make_ip(10, 0, 0, 3);

struct Pair {
    Network net;
    HostId a;
    HostId b;
    RecordingEndpoint ea;
    RecordingEndpoint eb;
    SocketId sa;
    SocketId sb;

    explicit Pair(LinkConfig link)
        : net(link),
          a(net.add_host("a")),
          b((net.add_interface(a, kIpA), net.add_host("b"))),
          ea((net.add_interface(b, kIpB), net.transport(a))),
          eb(net.transport(b)),
          sa(net.transport(a).open_socket(SocketAddr{kIpA, 100}).value()),
          sb(net.transport(b).open_socket(SocketAddr{kIpB, 200}).value()) {
        net.attach(a, &ea);
        net.attach(b, &eb);
    }
};

}  // namespace

TEST_SUITE("netsim") {

TEST_CASE("datagrams arrive after exactly delay_ms") {
    Pair p(LinkConfig{7, 0.0, 1});
    REQUIRE(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {1, 2, 3}).ok());
    p.net.advance(100);

    REQUIRE(p.eb.rx.size() == 1);
    CHECK(p.eb.rx[0].t == 7);
    CHECK(p.eb.rx[0].src == SocketAddr{kIpA, 100});
    CHECK(p.eb.rx[0].bytes == std::vector<std::uint8_t>{1, 2, 3});
    CHECK(p.net.datagrams_sent() == 1);
    CHECK(p.net.datagrams_delivered() == 1);
    CHECK(p.net.now() == 100);
}

TEST_CASE("loss_rate 1.0 drops everything") {
    Pair p(LinkConfig{5, 1.0, 1});
    for (int i = 0; i < 10; ++i)
        REQUIRE(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {7}).ok());
    p.net.advance(100);

    CHECK(p.eb.rx.empty());
    CHECK(p.net.datagrams_sent() == 10);
    CHECK(p.net.datagrams_delivered() == 0);
    CHECK(p.net.trace().joined().find("DROP loss") != std::string::npos);
}

TEST_CASE("send fails without a socket or an up source interface") {
    Pair p(LinkConfig{5, 0.0, 1});
    CHECK(p.net.transport(p.a).send(999, SocketAddr{kIpB, 200}, {1}).error() ==
          SendError::kBadSocket);

    p.net.stack(p.a).set_interface(0, false);
    CHECK(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {1}).error() ==
          SendError::kNoRoute);
}

TEST_CASE("timers fire at the armed time in arm order") {
    Pair p(LinkConfig{5, 0.0, 1});
    const TimerId t1 = p.net.transport(p.a).arm_timer(5);
    const TimerId t2 = p.net.transport(p.a).arm_timer(5);
    const TimerId t3 = p.net.transport(p.a).arm_timer(3);
    p.net.transport(p.a).cancel_timer(t3);
    p.net.advance(10);

    REQUIRE(p.ea.timer_fires.size() == 2);
    CHECK(p.ea.timer_fires[0] == std::pair<SimTime, TimerId>{5, t1});
    CHECK(p.ea.timer_fires[1] == std::pair<SimTime, TimerId>{5, t2});
}

TEST_CASE("identical configs replay byte-identical traces") {
    const auto run_once = [] {
        Pair p(LinkConfig{5, 0.25, 77});
        for (int i = 0; i < 20; ++i)
            p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {std::uint8_t(i)}).ok();
        p.net.transport(p.b).arm_timer(12);
        p.net.advance(50);
        return p.net.trace().joined();
    };
    const std::string first = run_once();
    CHECK(first == run_once());
    CHECK(!first.empty());
}

TEST_CASE("different seeds change loss outcomes") {
    const auto delivered = [](std::uint64_t seed) {
        Pair p(LinkConfig{5, 0.5, seed});
        for (int i = 0; i < 40; ++i)
            p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {1}).ok();
        p.net.advance(100);
        return p.eb.rx.size();
    };
    CHECK(delivered(1) != delivered(2));
}

TEST_CASE("handover schedule downs and reactivates with fresh addresses") {
    Pair p(LinkConfig{5, 0.0, 1});
    p.net.set_handover(p.b, 0, HandoverSchedule{10000, 0, 200, true});
    p.net.advance(30500);

    REQUIRE(p.eb.iface_events.size() == 6);
    CHECK(p.eb.iface_events[0].t == 10000);
    CHECK(!p.eb.iface_events[0].up);
    CHECK(p.eb.iface_events[1].t == 10200);
    CHECK(p.eb.iface_events[1].up);
    CHECK(p.eb.iface_events[1].ip == kIpB + 1);
    CHECK(p.eb.iface_events[2].t == 20000);
    CHECK(p.eb.iface_events[3].t == 20200);
    CHECK(p.eb.iface_events[3].ip == kIpB + 2);
    CHECK(p.eb.iface_events[4].t == 30000);
    CHECK(p.eb.iface_events[5].ip == kIpB + 3);
    CHECK(p.net.stack(p.b).ip_up(kIpB + 3));
}

TEST_CASE("renumber=false keeps the address across reactivations") {
    Pair p(LinkConfig{5, 0.0, 1});
    p.net.set_handover(p.b, 0, HandoverSchedule{10000, 0, 200, false});
    p.net.advance(10500);
    REQUIRE(p.eb.iface_events.size() == 2);
    CHECK(p.eb.iface_events[1].ip == kIpB);
}

TEST_CASE("interleaved schedules offset the second interface") {
    Network net(LinkConfig{5, 0.0, 1});
    const HostId h = net.add_host("h");
    net.add_interface(h, kIpA);
    net.add_interface(h, kIpB);
    RecordingEndpoint e(net.transport(h));
    net.attach(h, &e);
    net.set_handover(h, 0, HandoverSchedule{10000, 0, 200, true});
    net.set_handover(h, 1, HandoverSchedule{10000, 5000, 200, true});
    net.advance(26000);

    std::vector<std::pair<SimTime, IfaceId>> downs;
    for (const auto& ev : e.iface_events)
        if (!ev.up) downs.emplace_back(ev.t, ev.iface);
    REQUIRE(downs.size() == 4);
    CHECK(downs[0] == std::pair<SimTime, IfaceId>{10000, 0});
    CHECK(downs[1] == std::pair<SimTime, IfaceId>{15000, 1});
    CHECK(downs[2] == std::pair<SimTime, IfaceId>{20000, 0});
    CHECK(downs[3] == std::pair<SimTime, IfaceId>{25000, 1});
}

TEST_CASE("in-flight datagrams to a downed interface are lost") {
    Pair p(LinkConfig{7, 0.0, 1});
    p.net.set_handover(p.b, 0, HandoverSchedule{10000, 0, 200, false});
    p.net.advance(9998);
    // Arrives at 10005, inside the 10000..10200 outage.
    REQUIRE(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {1}).ok());
    p.net.advance(11000);
    CHECK(p.eb.rx.empty());
    // After reactivation the same destination works again.
    REQUIRE(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {2}).ok());
    p.net.advance(12000);
    REQUIRE(p.eb.rx.size() == 1);
}

TEST_CASE("nat filter matches the cone truth table") {
    const SocketAddr internal{kInternalIp, 5555};
    const SocketAddr dest{kServer1, 5000};
    const SocketAddr same_ip_other_port{kServer1, 5001};
    const SocketAddr other_ip{kServer2, 5000};

    const auto accepts = [&](NatMode mode, const SocketAddr& from) {
        NatGateway gw(NatPolicy{mode, 30000}, kNatIp);
        const Datagram fwd = gw.translate_outbound(Datagram{internal, dest, {1}, 0}, 100);
        REQUIRE(fwd.src.ip == kNatIp);
        const auto back = gw.translate_inbound(Datagram{from, fwd.src, {2}, 0}, 200);
        if (back.has_value()) CHECK(back->dst == internal);
        return back.has_value();
    };

    CHECK(accepts(NatMode::kFullCone, dest));
    CHECK(accepts(NatMode::kFullCone, same_ip_other_port));
    CHECK(accepts(NatMode::kFullCone, other_ip));

    CHECK(accepts(NatMode::kAddressRestricted, dest));
    CHECK(accepts(NatMode::kAddressRestricted, same_ip_other_port));
    CHECK(!accepts(NatMode::kAddressRestricted, other_ip));

    CHECK(accepts(NatMode::kPortRestricted, dest));
    CHECK(!accepts(NatMode::kPortRestricted, same_ip_other_port));
    CHECK(!accepts(NatMode::kPortRestricted, other_ip));

    CHECK(accepts(NatMode::kSymmetric, dest));
    CHECK(!accepts(NatMode::kSymmetric, same_ip_other_port));
    CHECK(!accepts(NatMode::kSymmetric, other_ip));
}

TEST_CASE("port-restricted filter learns each contacted peer") {
    NatGateway gw(NatPolicy{NatMode::kPortRestricted, 30000}, kNatIp);
    const SocketAddr internal{kInternalIp, 5555};
    const SocketAddr peer1{kServer1, 5000};
    const SocketAddr peer2{kServer1, 6000};

    const Datagram f1 = gw.translate_outbound(Datagram{internal, peer1, {1}, 0}, 0);
    const Datagram f2 = gw.translate_outbound(Datagram{internal, peer2, {1}, 0}, 1);
    CHECK(f1.src == f2.src);  // cone: one binding per internal address

    CHECK(gw.translate_inbound(Datagram{peer1, f1.src, {2}, 0}, 2).has_value());
    CHECK(gw.translate_inbound(Datagram{peer2, f1.src, {2}, 0}, 3).has_value());
    CHECK(!gw.translate_inbound(Datagram{SocketAddr{kServer1, 7000}, f1.src, {2}, 0}, 4)
               .has_value());
}

TEST_CASE("symmetric mode allocates one binding per destination") {
    NatGateway gw(NatPolicy{NatMode::kSymmetric, 30000}, kNatIp);
    const SocketAddr internal{kInternalIp, 5555};
    const SocketAddr dest1{kServer1, 5000};
    const SocketAddr dest2{kServer2, 5000};

    const Datagram f1 = gw.translate_outbound(Datagram{internal, dest1, {1}, 0}, 0);
    const Datagram f2 = gw.translate_outbound(Datagram{internal, dest2, {1}, 0}, 1);
    CHECK(f1.src.port != f2.src.port);

    CHECK(gw.translate_inbound(Datagram{dest2, f2.src, {2}, 0}, 2).has_value());
    CHECK(!gw.translate_inbound(Datagram{dest1, f2.src, {2}, 0}, 3).has_value());
}

TEST_CASE("idle bindings expire after the mapping ttl") {
    NatGateway gw(NatPolicy{NatMode::kFullCone, 30000}, kNatIp);
    const SocketAddr internal{kInternalIp, 5555};
    const SocketAddr dest{kServer1, 5000};

    const Datagram fwd = gw.translate_outbound(Datagram{internal, dest, {1}, 0}, 0);
    CHECK(gw.translate_inbound(Datagram{dest, fwd.src, {2}, 0}, 29999).has_value());
    // The inbound above refreshed it; jump far past the ttl now.
    CHECK(!gw.translate_inbound(Datagram{dest, fwd.src, {2}, 0}, 70000).has_value());

    // A new outbound flow gets a fresh binding (next port).
    const Datagram again = gw.translate_outbound(Datagram{internal, dest, {1}, 0}, 70001);
    CHECK(again.src.port != fwd.src.port);
}

TEST_CASE("hosts behind nat are reachable only via the external address") {
    Pair p(LinkConfig{5, 0.0, 1});
    p.net.set_nat(p.b, NatPolicy{NatMode::kPortRestricted, 30000}, kNatIp);

    // b initiates; a sees the external source address.
    REQUIRE(p.net.transport(p.b).send(p.sb, SocketAddr{kIpA, 100}, {1}).ok());
    p.net.advance(10);
    REQUIRE(p.ea.rx.size() == 1);
    const SocketAddr external = p.ea.rx[0].src;
    CHECK(external.ip == kNatIp);

    // Reply to the external address from the contacted port: accepted.
    REQUIRE(p.net.transport(p.a).send(p.sa, external, {2}).ok());
    p.net.advance(20);
    REQUIRE(p.eb.rx.size() == 1);
    CHECK(p.eb.rx[0].src == SocketAddr{kIpA, 100});

    // From a different source port: filtered.
    const SocketId sa2 = p.net.transport(p.a).open_socket(SocketAddr{kIpA, 101}).value();
    REQUIRE(p.net.transport(p.a).send(sa2, external, {3}).ok());
    // Direct send to the internal address: unroutable.
    REQUIRE(p.net.transport(p.a).send(p.sa, SocketAddr{kIpB, 200}, {4}).ok());
    p.net.advance(30);
    CHECK(p.eb.rx.size() == 1);
}

TEST_CASE("advance never moves the clock backwards") {
    Pair p(LinkConfig{5, 0.0, 1});
    p.net.advance(50);
    CHECK(p.net.now() == 50);
    p.net.advance(50);
    CHECK(p.net.now() == 50);
    p.net.advance(49);  // no-op; the clock stays put
    CHECK(p.net.now() == 50);
}

}  // TEST_SUITE("netsim")
