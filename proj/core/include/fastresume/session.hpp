// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Session-identity and message-security layer: stateless handshake cookie,
// key/session-id derivation, per-message MAC, and sliding-window replay
// protection. The cookie doubles as the shared session secret — both
// endpoints holding it derive identical session state with no further
// communication, which is what makes resumption address-agnostic.

#ifndef FASTRESUME_SESSION_HPP_
#define FASTRESUME_SESSION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fastresume/result.hpp"
#include "fastresume/rng.hpp"
#include "fastresume/types.hpp"
#include "fastresume/wire.hpp"

namespace fastresume {

using Cookie = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 8>;

/// Per-server secret backing cookie generation; fixed for a whole run.
struct ServerSecret {
    std::array<std::uint8_t, 32> secret{};

    static ServerSecret from_rng(Rng& rng) { return ServerSecret{rng.next_bytes<32>()}; }
};

/// cookie = HMAC-SHA256(secret, client_ip(4,BE) || client_port(2,BE) || nonce).
/// The nonce travels with the cookie so the server stays stateless.
Cookie generate_cookie(const ServerSecret& secret, const SocketAddr& client, const Nonce& nonce);
bool verify_cookie(const ServerSecret& secret, const SocketAddr& client, const Nonce& nonce,
                   const Cookie& cookie);

/// 64-entry sliding bitmap over received sequence numbers. Accepts any new
/// seq above the window, any unseen seq inside it, and rejects duplicates
/// and seqs older than the window floor.
class ReplayWindow {
  public:
    static constexpr std::uint64_t kWindowSize = 64;

    /// True iff `seq` would be accepted right now (no state change).
    bool check(std::uint64_t seq) const;

    /// check() plus window update on acceptance. Returns accept.
    bool check_and_update(std::uint64_t seq);

    std::uint64_t max_seen() const { return max_seen_; }
    bool empty() const { return !any_; }

  private:
    std::uint64_t max_seen_ = 0;
    std::uint64_t bitmap_ = 0;  // bit k = (max_seen_ - k) received
    bool any_ = false;
};

enum class Role { kClient, kServer };

enum class UnprotectError {
    kBadSessionId,
    kBadMac,
    kReplayed,
};

const char* to_string(UnprotectError error);

/// Shared session state derived purely from the cookie:
///   session_id = first 8 bytes of SHA-256(cookie), big-endian
///   c2s key    = HMAC-SHA256(cookie, "c2s")
///   s2c key    = HMAC-SHA256(cookie, "s2c")
/// The MAC on a message is the first 16 bytes of HMAC-SHA256 over its full
/// encoding with the mac field zeroed, under the sender's directional key.
class Session {
  public:
    Session(Role role, const Cookie& cookie);

    std::uint64_t session_id() const { return session_id_; }
    std::uint64_t next_seq() const { return next_seq_; }
    const SocketAddr& peer_addr_hint() const { return peer_addr_hint_; }

    /// Stamps session_id, assigns the next send seq, and MACs the message.
    WireMessage protect(MessageType type, std::vector<std::uint8_t> payload);

    /// Verifies session id, MAC, and replay window. On acceptance updates the
    /// window and records `src` as the peer's latest address — the sole
    /// address-tracking step, so a peer that moves keeps its session.
    Result<std::vector<std::uint8_t>, UnprotectError> unprotect(const WireMessage& msg,
                                                                const SocketAddr& src);

  private:
    std::array<std::uint8_t, 16> compute_mac(const WireMessage& msg,
                                             const std::array<std::uint8_t, 32>& key) const;

    std::uint64_t session_id_ = 0;
    std::array<std::uint8_t, 32> tx_key_{};
    std::array<std::uint8_t, 32> rx_key_{};
    std::uint64_t next_seq_ = 0;
    ReplayWindow replay_;
    SocketAddr peer_addr_hint_{};
};

}  // namespace fastresume

#endif  // FASTRESUME_SESSION_HPP_
