// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Server endpoint state machines for the three variants:
//
//   baseline  WelcomeSocket takes the cookie exchange; the session then runs
//             over a CONNECTED ComSocket on an ephemeral port, torn down
//             after idle_timeout_ms of silence. A client that changes
//             address must complete a full new handshake.
//   ipc       The server answers the verified ClientHello from a brand-new
//             NON-CONNECTED socket on a different port and the whole session
//             lives there; any source that authenticates is accepted, so the
//             session survives client address changes. Fails behind
//             port-restricted (or stricter) NATs, whose filters discard the
//             ServerHello arriving from an unknown port.
//   tcs       The handshake runs on a temporary CONNECTED socket sharing the
//             welcome port (so NAT filters see the port they expect); the
//             server then redirects the client to a final non-connected
//             socket on a new port, retransmitting the AddressRedirect every
//             redirect_retx_ms until the client shows up there.

#ifndef FASTRESUME_SERVER_HPP_
#define FASTRESUME_SERVER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "fastresume/session.hpp"
#include "fastresume/transport.hpp"
#include "fastresume/types.hpp"
#include "fastresume/wire.hpp"

namespace fastresume {

enum class Variant { kBaseline, kIpc, kTcs };

const char* to_string(Variant variant);
std::optional<Variant> parse_variant(const std::string& text);

struct ServerConfig {
    SocketAddr welcome_addr{};
    Variant variant = Variant::kBaseline;
    SimTime idle_timeout_ms = 1000;  // baseline-only session teardown
    SimTime redirect_retx_ms = 500;
    int redirect_retx_limit = 40;  // safety valve against orphaned redirects
    std::uint16_t port_range_begin = 20000;
    std::uint16_t port_range_end = 29999;
    std::uint64_t seed = 1;
};

/// Deterministic sequential allocator over [begin, end], skipping ports the
/// caller reports as taken.
class PortAllocator {
  public:
    PortAllocator(std::uint16_t begin, std::uint16_t end) : begin_(begin), end_(end), next_(begin) {}

    std::optional<std::uint16_t> allocate(const std::function<bool(std::uint16_t)>& in_use);

  private:
    std::uint16_t begin_;
    std::uint16_t end_;
    std::uint16_t next_;
};

struct ServerMetrics {
    std::uint64_t handshakes_completed = 0;
    std::uint64_t handshake_flights_sent_after_establish = 0;
    std::uint64_t redirect_transmissions = 0;
    std::uint64_t acks_sent = 0;
    std::uint64_t drops = 0;  // undecodable, unverifiable, or out-of-place input
};

class ServerEndpoint final : public Endpoint {
  public:
    ServerEndpoint(Transport& io, ServerConfig cfg);

    void start() override;
    void on_datagram(SocketId sock, const SocketAddr& src,
                     std::span<const std::uint8_t> bytes) override;
    void on_timer(TimerId timer) override;
    void on_interface_event(IfaceId, bool, std::uint32_t) override {}

    const ServerMetrics& metrics() const { return metrics_; }
    std::size_t session_count() const { return sessions_.size(); }

  private:
    struct SessionState {
        enum class Phase { kAwaitHandshakeAck, kRedirecting, kEstablished };
        Phase phase = Phase::kAwaitHandshakeAck;
        Session sess;
        std::optional<SocketId> com_socket;   // final data socket (all variants)
        std::optional<SocketId> temp_socket;  // TCS handshake socket on the welcome port
        SocketAddr com_addr;                  // local address of com_socket
        SocketAddr client_hint;
        std::uint64_t highest_app_id = 0;
        SimTime last_activity = 0;
        std::optional<TimerId> idle_timer;      // baseline
        std::optional<TimerId> redirect_timer;  // TCS
        int redirect_sends = 0;

        explicit SessionState(Session s) : sess(std::move(s)) {}
    };

    void handle_client_hello(const WireMessage& msg, const SocketAddr& src);
    void handle_cookie_hello(const WireMessage& msg, const SocketAddr& src);
    void handle_session_message(SocketId sock, const WireMessage& msg, const SocketAddr& src);
    void handle_handshake_ack(SessionState& state, const SocketAddr& src);
    void handle_data(SessionState& state, SocketId sock, const WireMessage& msg,
                     const SocketAddr& src, const std::vector<std::uint8_t>& payload);
    void complete_tcs_redirect(SessionState& state);
    void send_protected(SessionState& state, SocketId sock, const SocketAddr& dst,
                        MessageType type, std::vector<std::uint8_t> payload);
    void send_raw(SocketId sock, const SocketAddr& dst, const WireMessage& msg);
    void send_redirect(SessionState& state, SocketId sock, const SocketAddr& dst);
    std::optional<std::uint16_t> allocate_port();
    void note_established(SessionState& state);
    void touch(SessionState& state);
    void trace(const std::string& line, const SessionState* state = nullptr);

    Transport& io_;
    ServerConfig cfg_;
    Rng rng_;
    ServerSecret secret_;
    PortAllocator ports_;
    SocketId welcome_socket_ = 0;
    std::set<std::uint16_t> ports_in_use_;
    std::map<std::uint64_t, SessionState> sessions_;  // by session id
    std::map<TimerId, std::uint64_t> timer_sessions_;
    bool established_once_ = false;
    ServerMetrics metrics_;
};

}  // namespace fastresume

#endif  // FASTRESUME_SERVER_HPP_
