// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cassert>
#include <cerrno>
#include <cstring>
#include <utility>

#include "fastresume/wire.hpp"

namespace fastresume {

namespace {

class LiveTransport final : public Transport {
  public:
    LiveTransport(UdpLoop& loop, HostId host) : loop_(loop), host_(host) {}

    Result<SocketId, BindError> open_socket(const SocketAddr& local) override {
        return loop_.open_from(host_, local, std::nullopt);
    }
    Result<SocketId, BindError> open_connected(const SocketAddr& local,
                                               const SocketAddr& peer) override {
        return loop_.open_from(host_, local, peer);
    }
    void close_socket(SocketId sock) override { loop_.close_from(host_, sock); }
    Result<void, SendError> send(SocketId sock, const SocketAddr& dst,
                                 std::vector<std::uint8_t> bytes) override {
        return loop_.send_from(host_, sock, dst, std::move(bytes));
    }
    TimerId arm_timer(SimTime delay_ms) override { return loop_.arm_timer(host_, delay_ms); }
    void cancel_timer(TimerId timer) override { loop_.cancel_timer(timer); }
    SimTime now_ms() const override { return loop_.now_ms(); }
    std::vector<InterfaceInfo> interfaces() const override {
        std::vector<InterfaceInfo> out;
        for (const Interface& iface : loop_.stack(host_).interfaces())
            out.push_back(InterfaceInfo{iface.id, iface.ip, iface.up});
        return out;
    }
    void trace(const std::string& line) override { loop_.trace().append(loop_.now_ms(), line); }

  private:
    UdpLoop& loop_;
    HostId host_;
};

sockaddr_in to_os(const SocketAddr& addr) {
    sockaddr_in out{};
    out.sin_family = AF_INET;
    out.sin_addr.s_addr = htonl(addr.ip);
    out.sin_port = htons(addr.port);
    return out;
}

SocketAddr from_os(const sockaddr_in& addr) {
    return SocketAddr{ntohl(addr.sin_addr.s_addr), ntohs(addr.sin_port)};
}

std::string describe_bytes(const std::vector<std::uint8_t>& bytes) {
    const auto decoded = decode(bytes);
    if (decoded.ok()) return describe(decoded.value());
    return "undecodable len=" + std::to_string(bytes.size());
}

}  // namespace

UdpLoop::UdpLoop() : epoch_(std::chrono::steady_clock::now()) {
    rx_buf_.resize(kWireOverhead + kMaxPayload);
}

UdpLoop::~UdpLoop() {
    for (const Binding& binding : bindings_) ::close(binding.fd);
}

HostId UdpLoop::add_host(std::string name, std::uint32_t ip) {
    const HostId id = HostId(hosts_.size());
    hosts_.push_back(std::make_unique<Host>(std::move(name)));
    hosts_.back()->stack.add_interface(ip);
    hosts_.back()->view = std::make_unique<LiveTransport>(*this, id);
    return id;
}

HostStack& UdpLoop::stack(HostId host) { return hosts_.at(host)->stack; }

void UdpLoop::attach(HostId host, Endpoint* endpoint) { hosts_.at(host)->endpoint = endpoint; }

Transport& UdpLoop::transport(HostId host) { return *hosts_.at(host)->view; }

SimTime UdpLoop::now_ms() const {
    const auto elapsed = std::chrono::steady_clock::now() - epoch_;
    return SimTime(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
}

UdpLoop::Binding* UdpLoop::find_binding(HostId host, const SocketAddr& local) {
    for (Binding& binding : bindings_)
        if (binding.host == host && binding.local == local) return &binding;
    return nullptr;
}

UdpLoop::Binding* UdpLoop::find_binding(int fd) {
    for (Binding& binding : bindings_)
        if (binding.fd == fd) return &binding;
    return nullptr;
}

Result<SocketId, BindError> UdpLoop::open_from(HostId host, const SocketAddr& local,
                                               const std::optional<SocketAddr>& peer) {
    Host& h = *hosts_.at(host);
    auto bound = peer.has_value() ? h.stack.bind_connected(local, *peer) : h.stack.bind(local);
    if (!bound.ok()) return bound;

    if (Binding* existing = find_binding(host, local); existing != nullptr) {
        existing->users++;
        return bound;
    }
    const int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_NONBLOCK, 0);
    if (fd < 0) {
        h.stack.close(bound.value());
        return BindError::kAddressInUse;
    }
    const sockaddr_in os = to_os(local);
    if (::bind(fd, reinterpret_cast<const sockaddr*>(&os), sizeof os) != 0) {
        ::close(fd);
        h.stack.close(bound.value());
        return BindError::kAddressInUse;
    }
    bindings_.push_back(Binding{fd, host, local, 1});
    return bound;
}

void UdpLoop::close_from(HostId host, SocketId sock) {
    Host& h = *hosts_.at(host);
    const SocketEntry* entry = h.stack.find(sock);
    if (entry == nullptr) return;
    const SocketAddr local = entry->local;
    h.stack.close(sock);
    // The descriptor stays open even at zero users: endpoints close and rebind
    // the same local address within one callback, and closing the fd would
    // discard datagrams the kernel already queued for it. run_until() reaps
    // bindings that remain orphaned once control returns to the loop.
    if (Binding* binding = find_binding(host, local); binding != nullptr) binding->users--;
}

Result<void, SendError> UdpLoop::send_from(HostId host, SocketId sock, const SocketAddr& dst,
                                           std::vector<std::uint8_t> bytes) {
    Host& h = *hosts_.at(host);
    const SocketEntry* entry = h.stack.find(sock);
    if (entry == nullptr) return SendError::kBadSocket;
    Binding* binding = find_binding(host, entry->local);
    if (binding == nullptr) return SendError::kBadSocket;

    datagrams_sent_++;
    trace_.append(now_ms(), "SEND " + format_addr(entry->local) + " -> " + format_addr(dst) +
                                " " + describe_bytes(bytes));
    const sockaddr_in os = to_os(dst);
    const ssize_t sent = ::sendto(binding->fd, bytes.data(), bytes.size(), 0,
                                  reinterpret_cast<const sockaddr*>(&os), sizeof os);
    if (sent < 0 || std::size_t(sent) != bytes.size()) return SendError::kNoRoute;
    return {};
}

TimerId UdpLoop::arm_timer(HostId host, SimTime delay_ms) {
    const TimerId id = next_timer_++;
    timers_.push(Timer{now_ms() + delay_ms, id, host});
    return id;
}

void UdpLoop::cancel_timer(TimerId timer) { cancelled_timers_.insert(timer); }

std::optional<SimTime> UdpLoop::next_deadline() const {
    if (timers_.empty()) return std::nullopt;
    return timers_.top().deadline;  // a cancelled head only causes an early wake
}

void UdpLoop::fire_due_timers() {
    const SimTime now = now_ms();
    while (!timers_.empty() && timers_.top().deadline <= now) {
        const Timer timer = timers_.top();
        timers_.pop();
        if (cancelled_timers_.erase(timer.id) > 0) continue;
        Host& h = *hosts_.at(timer.host);
        if (h.endpoint != nullptr) h.endpoint->on_timer(timer.id);
    }
}

void UdpLoop::reap_orphans() {
    while (true) {
        int orphan_fd = -1;
        for (const Binding& binding : bindings_)
            if (binding.users == 0) {
                orphan_fd = binding.fd;
                break;
            }
        if (orphan_fd < 0) return;
        // Flush whatever the kernel queued so it is dropped (and traced)
        // through the regular dispatch path, like a late arrival in the
        // simulator. A callback could even rebind the address meanwhile.
        drain_fd(orphan_fd);
        Binding* binding = find_binding(orphan_fd);
        if (binding == nullptr) continue;
        if (binding->users > 0) continue;  // resurrected during the drain
        ::close(orphan_fd);
        for (auto it = bindings_.begin(); it != bindings_.end(); ++it)
            if (it->fd == orphan_fd) {
                bindings_.erase(it);
                break;
            }
    }
}

void UdpLoop::drain_fd(int fd) {
    while (true) {
        // Re-resolved every round: a callback may have closed or replaced it.
        Binding* binding = find_binding(fd);
        if (binding == nullptr) return;
        sockaddr_in os{};
        socklen_t len = sizeof os;
        const ssize_t got = ::recvfrom(fd, rx_buf_.data(), rx_buf_.size(), 0,
                                       reinterpret_cast<sockaddr*>(&os), &len);
        if (got < 0) return;  // drained (EAGAIN) or failed; either way move on

        Datagram dgram;
        dgram.src = from_os(os);
        dgram.dst = binding->local;
        dgram.bytes.assign(rx_buf_.begin(), rx_buf_.begin() + got);
        dgram.inject_time = now_ms();
        Host& h = *hosts_.at(binding->host);

        const DeliverResult result = h.stack.deliver(dgram);
        trace_.append(now_ms(),
                      "DISPATCH " + format_addr(dgram.dst) + " from " + format_addr(dgram.src) +
                          " -> " +
                          (result.socket.has_value() ? std::to_string(*result.socket) : "DROP") +
                          " reason=" + to_string(result.reason));
        if (!result.socket.has_value()) continue;
        datagrams_delivered_++;
        if (h.endpoint == nullptr) continue;  // leave queued for direct inspection
        const std::optional<RxRecord> record = h.stack.pop_rx(*result.socket);
        assert(record.has_value());
        h.endpoint->on_datagram(*result.socket, record->src, record->bytes);
    }
}

bool UdpLoop::run_until(const std::function<bool()>& done, SimTime cap_ms) {
    const SimTime deadline = now_ms() + cap_ms;
    while (true) {
        if (done()) return true;
        fire_due_timers();
        if (done()) return true;

        reap_orphans();
        if (done()) return true;

        const SimTime now = now_ms();
        if (now >= deadline) return done();
        SimTime until = deadline;
        if (const std::optional<SimTime> next = next_deadline(); next.has_value())
            until = std::min(until, std::max(*next, now));
        const int timeout = int(std::min<SimTime>(until - now, 100));

        std::vector<pollfd> fds;
        fds.reserve(bindings_.size());
        for (const Binding& binding : bindings_) fds.push_back(pollfd{binding.fd, POLLIN, 0});
        const int rc = ::poll(fds.empty() ? nullptr : fds.data(), nfds_t(fds.size()), timeout);
        if (rc < 0) {
            if (errno == EINTR) continue;
            return done();  // poll itself failed; do not spin
        }
        if (rc == 0) continue;
        std::vector<int> ready;
        for (const pollfd& p : fds)
            if ((p.revents & (POLLIN | POLLERR | POLLHUP)) != 0) ready.push_back(p.fd);
        for (const int ready_fd : ready) drain_fd(ready_fd);
    }
}

}  // namespace fastresume
