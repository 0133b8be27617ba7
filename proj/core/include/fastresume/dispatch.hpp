// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Emulation of the kernel's UDP datagram demultiplexing across connected and
// non-connected sockets that may share a local address. Delivery rule, in
// order:
//   1. a connected socket whose local matches dst and whose peer equals src;
//   2. a non-connected socket whose local matches dst;
//   3. drop.
// A wildcard-ip local matches any destination ip on the host; an exact-ip
// match is preferred over a wildcard one, and remaining ties go to the
// lowest socket id.

#ifndef FASTRESUME_DISPATCH_HPP_
#define FASTRESUME_DISPATCH_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "fastresume/result.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

enum class BindError {
    kInvalidPort,    // port 0
    kNoSuchAddress,  // ip not owned by any interface and not wildcard
    kAddressInUse,
};

enum class StackError {
    kUnknownInterface,
};

const char* to_string(BindError error);

struct RxRecord {
    SocketAddr src;
    std::vector<std::uint8_t> bytes;
};

struct SocketEntry {
    SocketId id = 0;
    SocketAddr local;
    std::optional<SocketAddr> peer;  // present iff connected
    std::deque<RxRecord> rx_queue;

    bool connected() const { return peer.has_value(); }
};

struct Interface {
    IfaceId id = 0;
    std::uint32_t ip = 0;
    bool up = true;
};

enum class DeliverReason { kConnectedMatch, kUnconnected, kNone };

const char* to_string(DeliverReason reason);

struct DeliverResult {
    std::optional<SocketId> socket;  // nullopt = dropped
    DeliverReason reason = DeliverReason::kNone;
};

class HostStack {
  public:
    HostStack() = default;
    explicit HostStack(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    // -- interfaces ----------------------------------------------------------
    IfaceId add_interface(std::uint32_t ip);
    Result<void, StackError> set_interface(IfaceId iface, bool up,
                                           std::optional<std::uint32_t> new_ip = std::nullopt);
    const std::vector<Interface>& interfaces() const { return interfaces_; }
    const Interface* interface(IfaceId iface) const;

    /// True iff some up interface owns `ip`.
    bool ip_up(std::uint32_t ip) const;
    /// True iff some interface (up or down) owns `ip`.
    bool owns_ip(std::uint32_t ip) const;
    std::optional<std::uint32_t> first_up_ip() const;

    // -- sockets -------------------------------------------------------------
    Result<SocketId, BindError> bind(const SocketAddr& local);
    Result<SocketId, BindError> bind_connected(const SocketAddr& local, const SocketAddr& peer);
    void close(SocketId id);
    const SocketEntry* find(SocketId id) const;
    SocketEntry* find(SocketId id);
    std::size_t socket_count() const { return sockets_.size(); }

    /// Applies the delivery rule and appends to the winner's rx_queue.
    /// The caller is responsible for ensuring dgram.dst targets this host on
    /// an up interface; deliver() itself only consults the socket table.
    DeliverResult deliver(const Datagram& dgram);

    std::optional<RxRecord> pop_rx(SocketId id);

  private:
    std::string name_;
    std::vector<Interface> interfaces_;
    std::vector<SocketEntry> sockets_;  // ascending id order
    SocketId next_socket_id_ = 1;
};

}  // namespace fastresume

#endif  // FASTRESUME_DISPATCH_HPP_
