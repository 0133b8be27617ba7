// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// The boundary between endpoint state machines and whatever carries their
// datagrams. The discrete-event simulator implements it for benchmarks and
// tests; a thin OS-socket adapter can implement the same contract for live
// demos. Endpoints must not block inside callbacks.

#ifndef FASTRESUME_TRANSPORT_HPP_
#define FASTRESUME_TRANSPORT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastresume/dispatch.hpp"
#include "fastresume/result.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

enum class SendError {
    kBadSocket,
    kNoRoute,  // the socket's source address is on no up interface
};

const char* to_string(SendError error);

struct InterfaceInfo {
    IfaceId id = 0;
    std::uint32_t ip = 0;
    bool up = true;
};

class Transport {
  public:
    virtual ~Transport() = default;

    virtual Result<SocketId, BindError> open_socket(const SocketAddr& local) = 0;
    virtual Result<SocketId, BindError> open_connected(const SocketAddr& local,
                                                       const SocketAddr& peer) = 0;
    virtual void close_socket(SocketId sock) = 0;
    virtual Result<void, SendError> send(SocketId sock, const SocketAddr& dst,
                                         std::vector<std::uint8_t> bytes) = 0;

    /// One-shot timer; fires Endpoint::on_timer(id) after delay_ms.
    virtual TimerId arm_timer(SimTime delay_ms) = 0;
    virtual void cancel_timer(TimerId timer) = 0;

    virtual SimTime now_ms() const = 0;
    virtual std::vector<InterfaceInfo> interfaces() const = 0;
    virtual void trace(const std::string& line) = 0;
};

class Endpoint {
  public:
    virtual ~Endpoint() = default;

    virtual void start() = 0;
    virtual void on_datagram(SocketId sock, const SocketAddr& src,
                             std::span<const std::uint8_t> bytes) = 0;
    virtual void on_timer(TimerId timer) = 0;
    virtual void on_interface_event(IfaceId iface, bool up, std::uint32_t ip) = 0;
};

}  // namespace fastresume

#endif  // FASTRESUME_TRANSPORT_HPP_
