// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic discrete-event virtual network: per-packet one-way delay,
// seeded loss, optional NAT gateways with the four standard filtering modes,
// a virtual millisecond clock, and periodic interface-handover schedules.
// Events with equal timestamps fire in insertion order, so identical
// (config, seed) pairs replay bit-identical traces.

#ifndef FASTRESUME_NETSIM_HPP_
#define FASTRESUME_NETSIM_HPP_

#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "fastresume/dispatch.hpp"
#include "fastresume/rng.hpp"
#include "fastresume/transport.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

struct LinkConfig {
    SimTime delay_ms = 5;   // one-way, each direction
    double loss_rate = 0.0;
    std::uint64_t seed = 1;
};

enum class NatMode { kNone, kFullCone, kAddressRestricted, kPortRestricted, kSymmetric };

const char* to_string(NatMode mode);
std::optional<NatMode> parse_nat_mode(const std::string& text);

struct NatPolicy {
    NatMode mode = NatMode::kNone;
    SimTime mapping_ttl_ms = 30000;  // idle lifetime of a binding
};

struct NatBinding {
    SocketAddr internal;
    SocketAddr external;
    std::optional<SocketAddr> flow_dst;       // symmetric mode: one binding per destination
    std::vector<SocketAddr> permitted_peers;  // learned from outbound packets
    SimTime last_used = 0;
};

/// One NAT gateway in front of a single host. External ports are assigned
/// sequentially from 40000 per gateway.
class NatGateway {
  public:
    NatGateway(NatPolicy policy, std::uint32_t external_ip)
        : policy_(policy), external_ip_(external_ip) {}

    std::uint32_t external_ip() const { return external_ip_; }
    const std::vector<NatBinding>& bindings() const { return bindings_; }

    /// Creates/refreshes the binding for dgram.src and rewrites it to the
    /// external address. Always forwards.
    Datagram translate_outbound(const Datagram& dgram, SimTime now);

    /// Applies the mode's filter; on acceptance rewrites dgram.dst to the
    /// internal address. nullopt = filtered or no binding.
    std::optional<Datagram> translate_inbound(const Datagram& dgram, SimTime now);

  private:
    NatBinding& outbound_binding(const SocketAddr& internal, const SocketAddr& dst, SimTime now);
    void expire(SimTime now);

    NatPolicy policy_;
    std::uint32_t external_ip_;
    std::uint16_t next_port_ = 40000;
    std::vector<NatBinding> bindings_;
};

struct HandoverSchedule {
    SimTime period_ms = 10000;  // first shutdown at offset_ms + period_ms
    SimTime offset_ms = 0;
    SimTime downtime_ms = 200;
    bool renumber = true;  // reactivate with a fresh ip (base ip + generation)
};

/// Ordered line trace; every line is prefixed "t=<ms> ".
class TraceLog {
  public:
    void append(SimTime t, const std::string& line);
    const std::vector<std::string>& lines() const { return lines_; }
    void clear() { lines_.clear(); }
    std::string joined() const;
    void set_echo(std::FILE* sink) { echo_ = sink; }

  private:
    std::vector<std::string> lines_;
    std::FILE* echo_ = nullptr;
};

/// Returning true drops the datagram at send time (after NAT rewrite).
/// Used for scripted-loss tests, e.g. dropping the first k redirects.
using DropFilter = std::function<bool(const Datagram&)>;

class Network {
  public:
    explicit Network(LinkConfig link);
    ~Network();

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    HostId add_host(std::string name);
    HostStack& stack(HostId host);
    const HostStack& stack(HostId host) const;
    IfaceId add_interface(HostId host, std::uint32_t ip);
    void attach(HostId host, Endpoint* endpoint);
    Transport& transport(HostId host);

    void set_nat(HostId host, NatPolicy policy, std::uint32_t external_ip);
    const NatGateway* nat(HostId host) const;
    void set_handover(HostId host, IfaceId iface, HandoverSchedule schedule);
    void set_drop_filter(DropFilter filter) { drop_filter_ = std::move(filter); }

    SimTime now() const { return clock_; }

    /// Processes every event with time <= until, then sets the clock to
    /// `until`.
    void advance(SimTime until);

    /// Runs until done() holds (checked after each event) or the clock would
    /// pass `cap`. Returns done().
    bool run_until(const std::function<bool()>& done, SimTime cap);

    TraceLog& trace() { return trace_; }
    std::uint64_t datagrams_sent() const { return datagrams_sent_; }
    std::uint64_t datagrams_delivered() const { return datagrams_delivered_; }

    // Transport backend (used by the per-host Transport views).
    Result<void, SendError> send_from(HostId host, SocketId sock, const SocketAddr& dst,
                                      std::vector<std::uint8_t> bytes);
    TimerId arm_timer(HostId host, SimTime delay_ms);
    void cancel_timer(TimerId timer);

  private:
    struct Event {
        enum class Kind { kArrival, kIfaceDown, kIfaceUp, kTimer };
        SimTime time = 0;
        std::uint64_t order = 0;
        Kind kind = Kind::kArrival;
        Datagram dgram;        // kArrival
        HostId host = 0;       // kIface*/kTimer
        IfaceId iface = 0;     // kIface*
        std::uint32_t ip = 0;  // kIfaceUp: address to assume
        TimerId timer = 0;     // kTimer
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.order > b.order;
        }
    };
    struct HandoverState {
        HandoverSchedule schedule;
        std::uint32_t base_ip = 0;
        std::uint32_t generation = 0;  // completed reactivations
    };
    struct Host {
        HostStack stack;
        Endpoint* endpoint = nullptr;
        std::unique_ptr<Transport> view;
        std::unique_ptr<NatGateway> nat;
        std::vector<std::optional<HandoverState>> handover;  // per iface
    };

    void push(Event event);
    void process(const Event& event);
    void process_arrival(const Datagram& dgram);
    void deliver_to_host(HostId host, const Datagram& dgram);

    LinkConfig link_;
    Rng loss_rng_;
    std::vector<std::unique_ptr<Host>> hosts_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t next_order_ = 0;
    SimTime clock_ = 0;
    TimerId next_timer_ = 1;
    std::set<TimerId> cancelled_timers_;
    DropFilter drop_filter_;
    TraceLog trace_;
    std::uint64_t datagrams_sent_ = 0;
    std::uint64_t datagrams_delivered_ = 0;
};

}  // namespace fastresume

#endif  // FASTRESUME_NETSIM_HPP_
