// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: brute-force reference oracles (dispatch rule, replay
// window) and a recording endpoint for driving the simulator directly.

#ifndef FASTRESUME_TESTS_SUPPORT_HPP_
#define FASTRESUME_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "fastresume/dispatch.hpp"
#include "fastresume/transport.hpp"
#include "fastresume/types.hpp"

namespace fastresume::testing {

/// A socket as the reference dispatcher sees it.
struct RefSocket {
    SocketId id = 0;
    SocketAddr local;
    std::optional<SocketAddr> peer;
};

/// Independent restatement of the delivery rule: connected-before-unconnected,
/// exact-ip-before-wildcard, lowest id within a class.
inline std::optional<SocketId> reference_deliver(const std::vector<RefSocket>& sockets,
                                                 const Datagram& dgram) {
    for (const bool connected : {true, false}) {
        for (const bool exact : {true, false}) {
            std::optional<SocketId> best;
            for (const RefSocket& s : sockets) {
                if (s.peer.has_value() != connected) continue;
                if (s.local.port != dgram.dst.port) continue;
                if (exact ? s.local.ip != dgram.dst.ip : s.local.ip != kWildcardIp) continue;
                if (connected && *s.peer != dgram.src) continue;
                if (!best.has_value() || s.id < *best) best = s.id;
            }
            if (best.has_value()) return best;
        }
    }
    return std::nullopt;
}

/// Set-based restatement of the 64-entry sliding replay window.
class ReferenceWindow {
  public:
    bool check_and_update(std::uint64_t seq) {
        if (any_) {
            if (seq + 64 <= max_) return false;  // below the window floor
            if (seen_.count(seq) != 0) return false;
        }
        seen_.insert(seq);
        any_ = true;
        max_ = std::max(max_, seq);
        return true;
    }

  private:
    std::set<std::uint64_t> seen_;
    std::uint64_t max_ = 0;
    bool any_ = false;
};

/// Endpoint that just records everything it is told.
struct RecordingEndpoint final : Endpoint {
    struct Rx {
        SimTime t = 0;
        SocketId sock = 0;
        SocketAddr src;
        std::vector<std::uint8_t> bytes;
    };
    struct IfaceEvent {
        SimTime t = 0;
        IfaceId iface = 0;
        bool up = false;
        std::uint32_t ip = 0;
    };

    explicit RecordingEndpoint(Transport& io) : io(&io) {}

    void start() override {}
    void on_datagram(SocketId sock, const SocketAddr& src,
                     std::span<const std::uint8_t> bytes) override {
        rx.push_back(Rx{io->now_ms(), sock, src, {bytes.begin(), bytes.end()}});
    }
    void on_timer(TimerId timer) override { timer_fires.emplace_back(io->now_ms(), timer); }
    void on_interface_event(IfaceId iface, bool up, std::uint32_t ip) override {
        iface_events.push_back(IfaceEvent{io->now_ms(), iface, up, ip});
    }

    Transport* io;
    std::vector<Rx> rx;
    std::vector<std::pair<SimTime, TimerId>> timer_fires;
    std::vector<IfaceEvent> iface_events;
};

}  // namespace fastresume::testing

#endif  // FASTRESUME_TESTS_SUPPORT_HPP_
