// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/session.hpp"

#include <algorithm>

#include "fastresume/crypto.hpp"

namespace fastresume {

Cookie generate_cookie(const ServerSecret& secret, const SocketAddr& client, const Nonce& nonce) {
    std::vector<std::uint8_t> input;
    input.reserve(4 + 2 + nonce.size());
    input.push_back(std::uint8_t(client.ip >> 24));
    input.push_back(std::uint8_t(client.ip >> 16));
    input.push_back(std::uint8_t(client.ip >> 8));
    input.push_back(std::uint8_t(client.ip));
    put_u16be(input, client.port);
    input.insert(input.end(), nonce.begin(), nonce.end());
    return hmac_sha256(secret.secret, input);
}

bool verify_cookie(const ServerSecret& secret, const SocketAddr& client, const Nonce& nonce,
                   const Cookie& cookie) {
    const Cookie expected = generate_cookie(secret, client, nonce);
    return ct_equal(expected, cookie);
}

bool ReplayWindow::check(std::uint64_t seq) const {
    if (!any_) return true;
    if (seq > max_seen_) return true;
    const std::uint64_t age = max_seen_ - seq;
    if (age >= kWindowSize) return false;
    return (bitmap_ & (std::uint64_t(1) << age)) == 0;
}

bool ReplayWindow::check_and_update(std::uint64_t seq) {
    if (!check(seq)) return false;
    if (!any_ || seq > max_seen_) {
        const std::uint64_t shift = any_ ? seq - max_seen_ : 0;
        bitmap_ = shift >= 64 ? 0 : bitmap_ << shift;
        bitmap_ |= 1;
        max_seen_ = seq;
        any_ = true;
    } else {
        bitmap_ |= std::uint64_t(1) << (max_seen_ - seq);
    }
    return true;
}

const char* to_string(UnprotectError error) {
    switch (error) {
        case UnprotectError::kBadSessionId: return "bad-session-id";
        case UnprotectError::kBadMac: return "bad-mac";
        case UnprotectError::kReplayed: return "replayed";
    }
    return "unknown";
}

Session::Session(Role role, const Cookie& cookie) {
    const auto digest = sha256(cookie);
    session_id_ = get_u64be(std::span<const std::uint8_t>(digest).first(8));
    static constexpr std::uint8_t kC2s[] = {'c', '2', 's'};
    static constexpr std::uint8_t kS2c[] = {'s', '2', 'c'};
    const auto c2s = hmac_sha256(cookie, kC2s);
    const auto s2c = hmac_sha256(cookie, kS2c);
    if (role == Role::kClient) {
        tx_key_ = c2s;
        rx_key_ = s2c;
    } else {
        tx_key_ = s2c;
        rx_key_ = c2s;
    }
}

std::array<std::uint8_t, 16> Session::compute_mac(const WireMessage& msg,
                                                  const std::array<std::uint8_t, 32>& key) const {
    WireMessage zeroed = msg;
    zeroed.mac.fill(0);
    const auto encoded = encode(zeroed);
    const auto digest = hmac_sha256(key, encoded.value());
    std::array<std::uint8_t, 16> mac{};
    std::copy_n(digest.begin(), mac.size(), mac.begin());
    return mac;
}

WireMessage Session::protect(MessageType type, std::vector<std::uint8_t> payload) {
    WireMessage msg;
    msg.type = type;
    msg.session_id = session_id_;
    msg.seq = next_seq_++;
    msg.payload = std::move(payload);
    msg.mac = compute_mac(msg, tx_key_);
    return msg;
}

Result<std::vector<std::uint8_t>, UnprotectError> Session::unprotect(const WireMessage& msg,
                                                                     const SocketAddr& src) {
    if (msg.session_id != session_id_) return UnprotectError::kBadSessionId;
    const auto expected = compute_mac(msg, rx_key_);
    if (!ct_equal(expected, msg.mac)) return UnprotectError::kBadMac;
    if (!replay_.check_and_update(msg.seq)) return UnprotectError::kReplayed;
    peer_addr_hint_ = src;
    return msg.payload;
}

}  // namespace fastresume
