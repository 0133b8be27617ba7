// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/types.hpp"

#include <cstdio>

namespace fastresume {

std::string format_ip(std::uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff,
                  (ip >> 8) & 0xff, ip & 0xff);
    return buf;
}

std::string format_addr(const SocketAddr& addr) {
    return format_ip(addr.ip) + ":" + std::to_string(addr.port);
}

std::optional<std::uint32_t> parse_ip(const std::string& text) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4) return std::nullopt;
    if (a > 255 || b > 255 || c > 255 || d > 255) return std::nullopt;
    return make_ip(std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(d));
}

std::optional<SocketAddr> parse_addr(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) return std::nullopt;
    const auto ip = parse_ip(text.substr(0, colon));
    if (!ip) return std::nullopt;
    unsigned port;
    char tail;
    if (std::sscanf(text.c_str() + colon + 1, "%u%c", &port, &tail) != 1) return std::nullopt;
    if (port > 65535) return std::nullopt;
    return SocketAddr{*ip, std::uint16_t(port)};
}

}  // namespace fastresume
