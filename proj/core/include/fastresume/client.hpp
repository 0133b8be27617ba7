// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Client endpoint for all three variants plus the benchmark workload driver:
// stop-and-wait Data/DataAck with an application retransmission timeout,
// handover reaction, and multi-home failover. Retransmissions carry a fresh
// wire seq (the replay window would reject a reused one) and repeat the
// 8-byte application message id in the payload so the server can dedup.

#ifndef FASTRESUME_CLIENT_HPP_
#define FASTRESUME_CLIENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastresume/server.hpp"
#include "fastresume/session.hpp"
#include "fastresume/transport.hpp"
#include "fastresume/types.hpp"
#include "fastresume/wire.hpp"

namespace fastresume {

struct ClientConfig {
    SocketAddr server_welcome{};
    Variant variant = Variant::kBaseline;
    SimTime app_timeout_ms = 1000;
    int total_messages = 600;
    SimTime processing_ms = 0;  // virtual per-message work between ack and next send
    std::uint16_t local_port = 1234;
};

struct ClientMetrics {
    bool done = false;
    SimTime first_hello_ms = 0;
    SimTime done_ms = 0;
    std::uint64_t handshakes_completed = 0;
    std::uint64_t handshake_flights_sent_after_establish = 0;
    std::uint64_t data_retransmissions = 0;
    std::uint64_t acked = 0;
    std::uint64_t handovers_observed = 0;      // active-interface shutdowns
    std::uint64_t handovers_mid_session = 0;   // ... while a session was established
    std::vector<SimTime> recovery_latency_ms;  // shutdown -> next accepted ack
};

class ClientEndpoint final : public Endpoint {
  public:
    ClientEndpoint(Transport& io, ClientConfig cfg);

    void start() override;
    void on_datagram(SocketId sock, const SocketAddr& src,
                     std::span<const std::uint8_t> bytes) override;
    void on_timer(TimerId timer) override;
    void on_interface_event(IfaceId iface, bool up, std::uint32_t ip) override;

    const ClientMetrics& metrics() const { return metrics_; }
    bool done() const { return phase_ == Phase::kDone; }
    bool established() const { return phase_ == Phase::kEstablished; }
    const SocketAddr& server_com_addr() const { return server_com_addr_; }

  private:
    enum class Phase { kIdle, kAwaitHvr, kAwaitSh, kAwaitSf, kEstablished, kDone };

    struct Inflight {
        std::uint64_t app_id = 0;
        std::vector<std::uint64_t> seqs;  // wire seqs carrying this app message
        int sends = 0;
        bool want_send = false;  // a (re)send is owed as soon as sending is possible
    };

    bool handshaking() const {
        return phase_ == Phase::kAwaitHvr || phase_ == Phase::kAwaitSh ||
               phase_ == Phase::kAwaitSf;
    }

    void start_handshake();
    void establish(const SocketAddr& com_addr);
    void teardown_connection();
    void resend_handshake_flight();
    void send_hello(bool with_cookie);
    void send_handshake_ack();
    void begin_next_message();
    void send_data();
    void finish();

    void handle_hello_verify(const WireMessage& msg);
    void handle_server_hello(const SocketAddr& src);
    void handle_server_finished();
    void handle_redirect(const std::vector<std::uint8_t>& payload);
    void handle_data_ack(const std::vector<std::uint8_t>& payload);

    bool open_active_socket(bool connected);
    std::optional<std::uint32_t> active_up_ip() const;
    std::optional<IfaceId> other_up_iface(IfaceId not_this) const;
    void send_raw(const SocketAddr& dst, const WireMessage& msg);
    void arm_handshake_timer();
    void arm_inflight_timer();
    void cancel(std::optional<TimerId>& timer);
    void trace(const std::string& line);

    Transport& io_;
    ClientConfig cfg_;
    Phase phase_ = Phase::kIdle;
    IfaceId active_iface_ = 0;
    std::optional<SocketId> socket_;
    std::optional<Session> session_;
    std::optional<CookiePayload> cookie_;
    SocketAddr server_com_addr_{};
    std::uint64_t next_app_id_ = 1;
    std::optional<Inflight> inflight_;
    bool want_handshake_ = false;  // handshake owed at the next usable interface
    bool sent_first_hello_ = false;
    bool established_once_ = false;
    std::optional<TimerId> hs_timer_;
    std::optional<TimerId> inflight_timer_;
    std::optional<TimerId> proc_timer_;
    std::optional<SimTime> recovering_since_;
    ClientMetrics metrics_;
};

}  // namespace fastresume

#endif  // FASTRESUME_CLIENT_HPP_
