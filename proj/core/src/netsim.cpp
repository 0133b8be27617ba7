// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/netsim.hpp"

#include <cassert>

#include "fastresume/wire.hpp"

namespace fastresume {

namespace {

class SimTransport final : public Transport {
  public:
    SimTransport(Network& net, HostId host) : net_(net), host_(host) {}

    Result<SocketId, BindError> open_socket(const SocketAddr& local) override {
        return net_.stack(host_).bind(local);
    }
    Result<SocketId, BindError> open_connected(const SocketAddr& local,
                                               const SocketAddr& peer) override {
        return net_.stack(host_).bind_connected(local, peer);
    }
    void close_socket(SocketId sock) override { net_.stack(host_).close(sock); }
    Result<void, SendError> send(SocketId sock, const SocketAddr& dst,
                                 std::vector<std::uint8_t> bytes) override {
        return net_.send_from(host_, sock, dst, std::move(bytes));
    }
    TimerId arm_timer(SimTime delay_ms) override { return net_.arm_timer(host_, delay_ms); }
    void cancel_timer(TimerId timer) override { net_.cancel_timer(timer); }
    SimTime now_ms() const override { return net_.now(); }
    std::vector<InterfaceInfo> interfaces() const override {
        std::vector<InterfaceInfo> out;
        for (const Interface& iface : net_.stack(host_).interfaces())
            out.push_back(InterfaceInfo{iface.id, iface.ip, iface.up});
        return out;
    }
    void trace(const std::string& line) override { net_.trace().append(net_.now(), line); }

  private:
    Network& net_;
    HostId host_;
};

std::string describe_bytes(const std::vector<std::uint8_t>& bytes) {
    const auto decoded = decode(bytes);
    if (decoded.ok()) return describe(decoded.value());
    return "undecodable len=" + std::to_string(bytes.size());
}

}  // namespace

const char* to_string(SendError error) {
    switch (error) {
        case SendError::kBadSocket: return "bad-socket";
        case SendError::kNoRoute: return "no-route";
    }
    return "unknown";
}

const char* to_string(NatMode mode) {
    switch (mode) {
        case NatMode::kNone: return "none";
        case NatMode::kFullCone: return "full-cone";
        case NatMode::kAddressRestricted: return "address-restricted";
        case NatMode::kPortRestricted: return "port-restricted";
        case NatMode::kSymmetric: return "symmetric";
    }
    return "unknown";
}

std::optional<NatMode> parse_nat_mode(const std::string& text) {
    if (text == "none") return NatMode::kNone;
    if (text == "full-cone") return NatMode::kFullCone;
    if (text == "address-restricted") return NatMode::kAddressRestricted;
    if (text == "port-restricted") return NatMode::kPortRestricted;
    if (text == "symmetric") return NatMode::kSymmetric;
    return std::nullopt;
}

void NatGateway::expire(SimTime now) {
    std::erase_if(bindings_, [&](const NatBinding& b) {
        return now - b.last_used > policy_.mapping_ttl_ms;
    });
}

NatBinding& NatGateway::outbound_binding(const SocketAddr& internal, const SocketAddr& dst,
                                         SimTime now) {
    expire(now);
    for (NatBinding& b : bindings_) {
        if (b.internal != internal) continue;
        if (policy_.mode == NatMode::kSymmetric && b.flow_dst != std::optional(dst)) continue;
        return b;
    }
    NatBinding b;
    b.internal = internal;
    b.external = SocketAddr{external_ip_, next_port_++};
    if (policy_.mode == NatMode::kSymmetric) b.flow_dst = dst;
    b.last_used = now;
    bindings_.push_back(b);
    return bindings_.back();
}

Datagram NatGateway::translate_outbound(const Datagram& dgram, SimTime now) {
    NatBinding& b = outbound_binding(dgram.src, dgram.dst, now);
    bool known = false;
    for (const SocketAddr& peer : b.permitted_peers) known = known || peer == dgram.dst;
    if (!known) b.permitted_peers.push_back(dgram.dst);
    b.last_used = now;
    Datagram out = dgram;
    out.src = b.external;
    return out;
}

std::optional<Datagram> NatGateway::translate_inbound(const Datagram& dgram, SimTime now) {
    expire(now);
    for (NatBinding& b : bindings_) {
        if (b.external != dgram.dst) continue;
        bool pass = false;
        switch (policy_.mode) {
            case NatMode::kNone:
            case NatMode::kFullCone:
                pass = true;
                break;
            case NatMode::kAddressRestricted:
                for (const SocketAddr& peer : b.permitted_peers)
                    pass = pass || peer.ip == dgram.src.ip;
                break;
            case NatMode::kPortRestricted:
                for (const SocketAddr& peer : b.permitted_peers) pass = pass || peer == dgram.src;
                break;
            case NatMode::kSymmetric:
                pass = b.flow_dst.has_value() && *b.flow_dst == dgram.src;
                break;
        }
        if (!pass) return std::nullopt;
        b.last_used = now;
        Datagram out = dgram;
        out.dst = b.internal;
        return out;
    }
    return std::nullopt;
}

void TraceLog::append(SimTime t, const std::string& line) {
    std::string full = "t=" + std::to_string(t) + " " + line;
    if (echo_ != nullptr) std::fprintf(echo_, "%s\n", full.c_str());
    lines_.push_back(std::move(full));
}

std::string TraceLog::joined() const {
    std::string out;
    for (const std::string& line : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

Network::Network(LinkConfig link)
    : link_(link), loss_rng_(Rng::derive_seed(link.seed, /*purpose=*/0x10551055)) {}

Network::~Network() = default;

HostId Network::add_host(std::string name) {
    const HostId id = HostId(hosts_.size());
    auto host = std::make_unique<Host>();
    host->stack = HostStack(std::move(name));
    host->view = std::make_unique<SimTransport>(*this, id);
    hosts_.push_back(std::move(host));
    return id;
}

HostStack& Network::stack(HostId host) { return hosts_.at(host)->stack; }
const HostStack& Network::stack(HostId host) const { return hosts_.at(host)->stack; }

IfaceId Network::add_interface(HostId host, std::uint32_t ip) {
    const IfaceId id = stack(host).add_interface(ip);
    hosts_.at(host)->handover.resize(stack(host).interfaces().size());
    return id;
}

void Network::attach(HostId host, Endpoint* endpoint) { hosts_.at(host)->endpoint = endpoint; }

Transport& Network::transport(HostId host) { return *hosts_.at(host)->view; }

void Network::set_nat(HostId host, NatPolicy policy, std::uint32_t external_ip) {
    hosts_.at(host)->nat = std::make_unique<NatGateway>(policy, external_ip);
}

const NatGateway* Network::nat(HostId host) const { return hosts_.at(host)->nat.get(); }

void Network::set_handover(HostId host, IfaceId iface, HandoverSchedule schedule) {
    Host& h = *hosts_.at(host);
    const Interface* entry = h.stack.interface(iface);
    assert(entry != nullptr);
    HandoverState state;
    state.schedule = schedule;
    state.base_ip = entry->ip;
    h.handover.at(iface) = state;

    Event down;
    down.kind = Event::Kind::kIfaceDown;
    down.time = schedule.offset_ms + schedule.period_ms;
    down.host = host;
    down.iface = iface;
    push(std::move(down));
}

void Network::push(Event event) {
    event.order = next_order_++;
    queue_.push(std::move(event));
}

void Network::advance(SimTime until) {
    while (!queue_.empty() && queue_.top().time <= until) {
        Event event = queue_.top();
        queue_.pop();
        clock_ = event.time;
        process(event);
    }
    if (until > clock_) clock_ = until;
}

bool Network::run_until(const std::function<bool()>& done, SimTime cap) {
    while (!done()) {
        if (queue_.empty() || queue_.top().time > cap) {
            if (cap > clock_) clock_ = cap;
            return done();
        }
        Event event = queue_.top();
        queue_.pop();
        clock_ = event.time;
        process(event);
    }
    return true;
}

void Network::process(const Event& event) {
    switch (event.kind) {
        case Event::Kind::kArrival:
            process_arrival(event.dgram);
            break;
        case Event::Kind::kIfaceDown: {
            Host& h = *hosts_.at(event.host);
            const Interface* entry = h.stack.interface(event.iface);
            assert(entry != nullptr);
            const std::uint32_t old_ip = entry->ip;
            h.stack.set_interface(event.iface, false);
            trace_.append(clock_, "IFACE host=" + h.stack.name() + " iface=" +
                                      std::to_string(event.iface) + " down");
            if (h.endpoint != nullptr) h.endpoint->on_interface_event(event.iface, false, old_ip);

            const std::optional<HandoverState>& state = h.handover.at(event.iface);
            if (state.has_value()) {
                Event up;
                up.kind = Event::Kind::kIfaceUp;
                up.time = clock_ + state->schedule.downtime_ms;
                up.host = event.host;
                up.iface = event.iface;
                up.ip = state->schedule.renumber ? state->base_ip + state->generation + 1
                                                 : state->base_ip;
                push(std::move(up));

                Event next_down;
                next_down.kind = Event::Kind::kIfaceDown;
                next_down.time = clock_ + state->schedule.period_ms;
                next_down.host = event.host;
                next_down.iface = event.iface;
                push(std::move(next_down));
            }
            break;
        }
        case Event::Kind::kIfaceUp: {
            Host& h = *hosts_.at(event.host);
            h.stack.set_interface(event.iface, true, event.ip);
            std::optional<HandoverState>& state = h.handover.at(event.iface);
            if (state.has_value()) state->generation++;
            trace_.append(clock_, "IFACE host=" + h.stack.name() + " iface=" +
                                      std::to_string(event.iface) + " up ip=" +
                                      format_ip(event.ip));
            if (h.endpoint != nullptr) h.endpoint->on_interface_event(event.iface, true, event.ip);
            break;
        }
        case Event::Kind::kTimer: {
            Host& h = *hosts_.at(event.host);
            const auto cancelled = cancelled_timers_.find(event.timer);
            if (cancelled != cancelled_timers_.end()) {
                cancelled_timers_.erase(cancelled);
                break;
            }
            if (h.endpoint != nullptr) h.endpoint->on_timer(event.timer);
            break;
        }
    }
}

void Network::process_arrival(const Datagram& dgram) {
    // NAT external addresses resolve first; hosts behind a NAT are reachable
    // only through it.
    for (auto& host : hosts_) {
        if (host->nat == nullptr || host->nat->external_ip() != dgram.dst.ip) continue;
        const std::optional<Datagram> inside = host->nat->translate_inbound(dgram, clock_);
        if (!inside.has_value()) {
            trace_.append(clock_, "NAT DROP " + format_addr(dgram.src) + " -> " +
                                      format_addr(dgram.dst));
            return;
        }
        trace_.append(clock_, "NAT in " + format_addr(dgram.dst) + " => " +
                                  format_addr(inside->dst));
        const HostId id = HostId(&host - hosts_.data());
        if (!host->stack.ip_up(inside->dst.ip)) {
            trace_.append(clock_, "DROP iface-down dst=" + format_addr(inside->dst));
            return;
        }
        deliver_to_host(id, *inside);
        return;
    }
    for (auto& host : hosts_) {
        if (host->nat != nullptr) continue;
        if (!host->stack.owns_ip(dgram.dst.ip)) continue;
        if (!host->stack.ip_up(dgram.dst.ip)) {
            trace_.append(clock_, "DROP iface-down dst=" + format_addr(dgram.dst));
            return;
        }
        deliver_to_host(HostId(&host - hosts_.data()), dgram);
        return;
    }
    trace_.append(clock_, "DROP no-host dst=" + format_addr(dgram.dst));
}

void Network::deliver_to_host(HostId host, const Datagram& dgram) {
    Host& h = *hosts_.at(host);
    const DeliverResult result = h.stack.deliver(dgram);
    std::string line = "DISPATCH " + format_addr(dgram.dst) + " from " + format_addr(dgram.src) +
                       " -> " +
                       (result.socket.has_value() ? std::to_string(*result.socket) : "DROP") +
                       " reason=" + to_string(result.reason);
    trace_.append(clock_, line);
    if (!result.socket.has_value()) return;
    datagrams_delivered_++;
    if (h.endpoint == nullptr) return;  // leave queued for direct inspection
    const std::optional<RxRecord> record = h.stack.pop_rx(*result.socket);
    assert(record.has_value());
    h.endpoint->on_datagram(*result.socket, record->src, record->bytes);
}

Result<void, SendError> Network::send_from(HostId host, SocketId sock, const SocketAddr& dst,
                                           std::vector<std::uint8_t> bytes) {
    Host& h = *hosts_.at(host);
    const SocketEntry* entry = h.stack.find(sock);
    if (entry == nullptr) return SendError::kBadSocket;

    std::uint32_t src_ip = entry->local.ip;
    if (src_ip == kWildcardIp) {
        const std::optional<std::uint32_t> up = h.stack.first_up_ip();
        if (!up.has_value()) return SendError::kNoRoute;
        src_ip = *up;
    } else if (!h.stack.ip_up(src_ip)) {
        return SendError::kNoRoute;
    }

    Datagram dgram;
    dgram.src = SocketAddr{src_ip, entry->local.port};
    dgram.dst = dst;
    dgram.bytes = std::move(bytes);
    datagrams_sent_++;
    trace_.append(clock_, "SEND " + format_addr(dgram.src) + " -> " + format_addr(dgram.dst) +
                              " " + describe_bytes(dgram.bytes));

    if (h.nat != nullptr) {
        Datagram outside = h.nat->translate_outbound(dgram, clock_);
        trace_.append(clock_, "NAT out " + format_addr(dgram.src) + " => " +
                                  format_addr(outside.src));
        dgram = std::move(outside);
    }
    if (drop_filter_ && drop_filter_(dgram)) {
        trace_.append(clock_, "DROP scripted " + format_addr(dgram.src) + " -> " +
                                  format_addr(dgram.dst));
        return {};
    }
    if (link_.loss_rate > 0.0 && loss_rng_.uniform01() < link_.loss_rate) {
        trace_.append(clock_, "DROP loss " + format_addr(dgram.src) + " -> " +
                                  format_addr(dgram.dst));
        return {};
    }

    Event arrival;
    arrival.kind = Event::Kind::kArrival;
    arrival.time = clock_ + link_.delay_ms;
    arrival.dgram = std::move(dgram);
    arrival.dgram.inject_time = arrival.time;
    push(std::move(arrival));
    return {};
}

TimerId Network::arm_timer(HostId host, SimTime delay_ms) {
    Event event;
    event.kind = Event::Kind::kTimer;
    event.time = clock_ + delay_ms;
    event.host = host;
    event.timer = next_timer_++;
    const TimerId id = event.timer;
    push(std::move(event));
    return id;
}

void Network::cancel_timer(TimerId timer) { cancelled_timers_.insert(timer); }

}  // namespace fastresume
