// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// A thin OS-socket adapter implementing the Transport contract over real
// IPv4 UDP sockets, so the endpoint state machines can run live (loopback or
// LAN) instead of inside the simulator. Logical connected and non-connected
// sockets that share a local address — the TCS welcome-port arrangement —
// multiplex over a single OS descriptor and are demultiplexed in user space
// with the same HostStack delivery rule the simulator applies, so the kernel
// only ever sees one bind per local address.
//
// Time is wall-clock milliseconds since the loop was created. Sends go out
// immediately; there is no delay/loss/NAT shaping and no interface events.
// Scope: concrete (non-wildcard) bind addresses; single-homed hosts.

#ifndef FASTRESUME_UDP_HPP_
#define FASTRESUME_UDP_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "fastresume/dispatch.hpp"
#include "fastresume/netsim.hpp"
#include "fastresume/result.hpp"
#include "fastresume/transport.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

class UdpLoop {
  public:
    UdpLoop();
    ~UdpLoop();

    UdpLoop(const UdpLoop&) = delete;
    UdpLoop& operator=(const UdpLoop&) = delete;

    /// A host groups the logical sockets of one endpoint; `ip` is the
    /// interface address its binds will use (e.g. 127.0.0.1).
    HostId add_host(std::string name, std::uint32_t ip);
    HostStack& stack(HostId host);
    void attach(HostId host, Endpoint* endpoint);
    Transport& transport(HostId host);

    SimTime now_ms() const;

    /// Polls sockets and timers until done() holds or cap_ms wall-clock
    /// milliseconds have elapsed. Returns done().
    bool run_until(const std::function<bool()>& done, SimTime cap_ms);

    TraceLog& trace() { return trace_; }
    std::uint64_t datagrams_sent() const { return datagrams_sent_; }
    std::uint64_t datagrams_delivered() const { return datagrams_delivered_; }

    // Transport backend (used by the per-host Transport views).
    Result<SocketId, BindError> open_from(HostId host, const SocketAddr& local,
                                          const std::optional<SocketAddr>& peer);
    void close_from(HostId host, SocketId sock);
    Result<void, SendError> send_from(HostId host, SocketId sock, const SocketAddr& dst,
                                      std::vector<std::uint8_t> bytes);
    TimerId arm_timer(HostId host, SimTime delay_ms);
    void cancel_timer(TimerId timer);

  private:
    struct Host {
        HostStack stack;
        Endpoint* endpoint = nullptr;
        std::unique_ptr<Transport> view;

        explicit Host(std::string name) : stack(std::move(name)) {}
    };
    struct Binding {  // one OS descriptor, shared by the logical sockets on `local`
        int fd = -1;
        HostId host = 0;
        SocketAddr local;
        std::size_t users = 0;
    };
    struct Timer {
        SimTime deadline = 0;
        TimerId id = 0;
        HostId host = 0;
    };
    struct TimerAfter {
        bool operator()(const Timer& a, const Timer& b) const {
            if (a.deadline != b.deadline) return a.deadline > b.deadline;
            return a.id > b.id;
        }
    };

    Binding* find_binding(HostId host, const SocketAddr& local);
    Binding* find_binding(int fd);
    void drain_fd(int fd);
    void reap_orphans();
    void fire_due_timers();
    std::optional<SimTime> next_deadline() const;

    std::chrono::steady_clock::time_point epoch_;
    std::vector<std::unique_ptr<Host>> hosts_;
    std::vector<Binding> bindings_;
    std::priority_queue<Timer, std::vector<Timer>, TimerAfter> timers_;
    std::set<TimerId> cancelled_timers_;
    TimerId next_timer_ = 1;
    TraceLog trace_;
    std::uint64_t datagrams_sent_ = 0;
    std::uint64_t datagrams_delivered_ = 0;
    std::vector<std::uint8_t> rx_buf_;
};

}  // namespace fastresume

#endif  // FASTRESUME_UDP_HPP_
