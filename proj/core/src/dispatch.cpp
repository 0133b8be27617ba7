// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/dispatch.hpp"

#include <algorithm>

namespace fastresume {

const char* to_string(BindError error) {
    switch (error) {
        case BindError::kInvalidPort: return "invalid-port";
        case BindError::kNoSuchAddress: return "no-such-address";
        case BindError::kAddressInUse: return "address-in-use";
    }
    return "unknown";
}

const char* to_string(DeliverReason reason) {
    switch (reason) {
        case DeliverReason::kConnectedMatch: return "connected-match";
        case DeliverReason::kUnconnected: return "unconnected";
        case DeliverReason::kNone: return "none";
    }
    return "unknown";
}

IfaceId HostStack::add_interface(std::uint32_t ip) {
    const IfaceId id = IfaceId(interfaces_.size());
    interfaces_.push_back(Interface{id, ip, true});
    return id;
}

Result<void, StackError> HostStack::set_interface(IfaceId iface, bool up,
                                                  std::optional<std::uint32_t> new_ip) {
    if (iface >= interfaces_.size()) return StackError::kUnknownInterface;
    Interface& entry = interfaces_[iface];
    entry.up = up;
    if (new_ip) entry.ip = *new_ip;
    return {};
}

const Interface* HostStack::interface(IfaceId iface) const {
    if (iface >= interfaces_.size()) return nullptr;
    return &interfaces_[iface];
}

bool HostStack::ip_up(std::uint32_t ip) const {
    for (const Interface& entry : interfaces_)
        if (entry.up && entry.ip == ip) return true;
    return false;
}

bool HostStack::owns_ip(std::uint32_t ip) const {
    for (const Interface& entry : interfaces_)
        if (entry.ip == ip) return true;
    return false;
}

std::optional<std::uint32_t> HostStack::first_up_ip() const {
    for (const Interface& entry : interfaces_)
        if (entry.up) return entry.ip;
    return std::nullopt;
}

Result<SocketId, BindError> HostStack::bind(const SocketAddr& local) {
    if (local.port == 0) return BindError::kInvalidPort;
    if (local.ip != kWildcardIp && !owns_ip(local.ip)) return BindError::kNoSuchAddress;
    for (const SocketEntry& sock : sockets_)
        if (!sock.connected() && sock.local == local) return BindError::kAddressInUse;
    sockets_.push_back(SocketEntry{next_socket_id_++, local, std::nullopt, {}});
    return sockets_.back().id;
}

Result<SocketId, BindError> HostStack::bind_connected(const SocketAddr& local,
                                                      const SocketAddr& peer) {
    if (local.port == 0) return BindError::kInvalidPort;
    if (local.ip != kWildcardIp && !owns_ip(local.ip)) return BindError::kNoSuchAddress;
    for (const SocketEntry& sock : sockets_)
        if (sock.connected() && sock.local == local && *sock.peer == peer)
            return BindError::kAddressInUse;
    sockets_.push_back(SocketEntry{next_socket_id_++, local, peer, {}});
    return sockets_.back().id;
}

void HostStack::close(SocketId id) {
    std::erase_if(sockets_, [id](const SocketEntry& sock) { return sock.id == id; });
}

const SocketEntry* HostStack::find(SocketId id) const {
    for (const SocketEntry& sock : sockets_)
        if (sock.id == id) return &sock;
    return nullptr;
}

SocketEntry* HostStack::find(SocketId id) {
    for (SocketEntry& sock : sockets_)
        if (sock.id == id) return &sock;
    return nullptr;
}

DeliverResult HostStack::deliver(const Datagram& dgram) {
    // Pass 1: connected sockets matching (local, peer). Pass 2: non-connected
    // sockets matching local. Within each pass an exact-ip local beats a
    // wildcard local; sockets_ is id-ordered, so the first hit of a given
    // specificity is the lowest id.
    for (const bool want_connected : {true, false}) {
        SocketEntry* wildcard_hit = nullptr;
        for (SocketEntry& sock : sockets_) {
            if (sock.connected() != want_connected) continue;
            if (sock.local.port != dgram.dst.port) continue;
            if (want_connected && *sock.peer != dgram.src) continue;
            if (sock.local.ip == dgram.dst.ip) {
                sock.rx_queue.push_back(RxRecord{dgram.src, dgram.bytes});
                return DeliverResult{sock.id, want_connected ? DeliverReason::kConnectedMatch
                                                             : DeliverReason::kUnconnected};
            }
            if (sock.local.ip == kWildcardIp && wildcard_hit == nullptr) wildcard_hit = &sock;
        }
        if (wildcard_hit != nullptr) {
            wildcard_hit->rx_queue.push_back(RxRecord{dgram.src, dgram.bytes});
            return DeliverResult{wildcard_hit->id, want_connected ? DeliverReason::kConnectedMatch
                                                                  : DeliverReason::kUnconnected};
        }
    }
    return DeliverResult{std::nullopt, DeliverReason::kNone};
}

std::optional<RxRecord> HostStack::pop_rx(SocketId id) {
    SocketEntry* sock = find(id);
    if (sock == nullptr || sock->rx_queue.empty()) return std::nullopt;
    RxRecord record = std::move(sock->rx_queue.front());
    sock->rx_queue.pop_front();
    return record;
}

}  // namespace fastresume
