// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef FASTRESUME_TYPES_HPP_
#define FASTRESUME_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fastresume {

/// Virtual time in milliseconds. The simulator clock has 1 ms resolution.
using SimTime = std::uint64_t;

using SocketId = std::uint32_t;  // per-host socket handle, 1-based
using IfaceId = std::uint32_t;   // per-host interface index, 0-based
using TimerId = std::uint64_t;   // per-network timer handle, 1-based
using HostId = std::uint32_t;    // network host index, 0-based

/// An IPv4 address (host byte order) plus UDP port.
struct SocketAddr {
    std::uint32_t ip = 0;  // 0 is the wildcard address
    std::uint16_t port = 0;

    auto operator<=>(const SocketAddr&) const = default;
};

constexpr std::uint32_t kWildcardIp = 0;

/// Builds a host-order IPv4 address from dotted-quad octets.
constexpr std::uint32_t make_ip(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return (std::uint32_t(a) << 24) | (std::uint32_t(b) << 16) | (std::uint32_t(c) << 8) |
           std::uint32_t(d);
}

std::string format_ip(std::uint32_t ip);
std::string format_addr(const SocketAddr& addr);

/// Parses "a.b.c.d" / "a.b.c.d:port". Returns nullopt on malformed input.
std::optional<std::uint32_t> parse_ip(const std::string& text);
std::optional<SocketAddr> parse_addr(const std::string& text);

/// A wire message in flight between two hosts.
struct Datagram {
    SocketAddr src;
    SocketAddr dst;
    std::vector<std::uint8_t> bytes;
    SimTime inject_time = 0;  // arrival time once scheduled
};

}  // namespace fastresume

#endif  // FASTRESUME_TYPES_HPP_
