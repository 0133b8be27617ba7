// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/client.hpp"

#include <cassert>

namespace fastresume {

ClientEndpoint::ClientEndpoint(Transport& io, ClientConfig cfg) : io_(io), cfg_(cfg) {}

void ClientEndpoint::trace(const std::string& line) {
    io_.trace("CLI " + std::string(to_string(cfg_.variant)) + " " + line);
}

std::optional<std::uint32_t> ClientEndpoint::active_up_ip() const {
    for (const InterfaceInfo& iface : io_.interfaces())
        if (iface.id == active_iface_ && iface.up) return iface.ip;
    return std::nullopt;
}

std::optional<IfaceId> ClientEndpoint::other_up_iface(IfaceId not_this) const {
    for (const InterfaceInfo& iface : io_.interfaces())
        if (iface.id != not_this && iface.up) return iface.id;
    return std::nullopt;
}

bool ClientEndpoint::open_active_socket(bool connected) {
    if (socket_.has_value()) {
        io_.close_socket(*socket_);
        socket_.reset();
    }
    const std::optional<std::uint32_t> ip = active_up_ip();
    if (!ip.has_value()) return false;
    const SocketAddr local{*ip, cfg_.local_port};
    const auto sock =
        connected ? io_.open_connected(local, server_com_addr_) : io_.open_socket(local);
    assert(sock.ok());
    socket_ = sock.value();
    return true;
}

void ClientEndpoint::cancel(std::optional<TimerId>& timer) {
    if (timer.has_value()) {
        io_.cancel_timer(*timer);
        timer.reset();
    }
}

void ClientEndpoint::start() {
    for (const InterfaceInfo& iface : io_.interfaces()) {
        if (!iface.up) continue;
        active_iface_ = iface.id;
        start_handshake();
        return;
    }
    want_handshake_ = true;  // no interface yet; begin when one comes up
    trace("deferred, no interface up");
}

void ClientEndpoint::start_handshake() {
    if (active_up_ip() == std::nullopt) {
        const std::optional<IfaceId> other = other_up_iface(active_iface_);
        if (!other.has_value()) {
            want_handshake_ = true;
            return;
        }
        active_iface_ = *other;
    }
    want_handshake_ = false;
    session_.reset();
    cookie_.reset();
    server_com_addr_ = cfg_.server_welcome;
    if (!open_active_socket(/*connected=*/false)) {
        want_handshake_ = true;
        return;
    }
    phase_ = Phase::kAwaitHvr;
    if (!sent_first_hello_) {
        sent_first_hello_ = true;
        metrics_.first_hello_ms = io_.now_ms();
    }
    send_hello(/*with_cookie=*/false);
    arm_handshake_timer();
    trace("hello -> " + format_addr(cfg_.server_welcome));
}

void ClientEndpoint::send_hello(bool with_cookie) {
    if (!with_cookie) {
        WireMessage hello;
        hello.type = MessageType::kClientHello;
        send_raw(cfg_.server_welcome, hello);
        return;
    }
    send_raw(cfg_.server_welcome,
             session_->protect(MessageType::kClientHello, encode_cookie_payload(*cookie_)));
}

void ClientEndpoint::send_handshake_ack() {
    send_raw(server_com_addr_, session_->protect(MessageType::kHandshakeAck, {}));
}

void ClientEndpoint::send_raw(const SocketAddr& dst, const WireMessage& msg) {
    if (is_handshake_type(msg.type) && established_once_)
        metrics_.handshake_flights_sent_after_establish++;
    if (!socket_.has_value()) return;
    const auto encoded = encode(msg);
    assert(encoded.ok());
    io_.send(*socket_, dst, encoded.value());
}

void ClientEndpoint::arm_handshake_timer() {
    cancel(hs_timer_);
    hs_timer_ = io_.arm_timer(cfg_.app_timeout_ms);
}

void ClientEndpoint::arm_inflight_timer() {
    cancel(inflight_timer_);
    inflight_timer_ = io_.arm_timer(cfg_.app_timeout_ms);
}

void ClientEndpoint::on_datagram(SocketId, const SocketAddr& src,
                                 std::span<const std::uint8_t> bytes) {
    if (phase_ == Phase::kDone) return;
    const auto decoded = decode(bytes);
    if (!decoded.ok()) return;
    const WireMessage& msg = decoded.value();

    if (msg.type == MessageType::kHelloVerifyRequest) {
        handle_hello_verify(msg);
        return;
    }
    if (!session_.has_value()) return;
    const auto payload = session_->unprotect(msg, src);
    if (!payload.ok()) return;

    switch (msg.type) {
        case MessageType::kServerHello:
            handle_server_hello(src);
            break;
        case MessageType::kServerFinished:
            handle_server_finished();
            break;
        case MessageType::kAddressRedirect:
            handle_redirect(payload.value());
            break;
        case MessageType::kDataAck:
            handle_data_ack(payload.value());
            break;
        default:
            break;
    }
}

void ClientEndpoint::handle_hello_verify(const WireMessage& msg) {
    if (phase_ != Phase::kAwaitHvr) return;
    const auto payload = decode_cookie_payload(msg.payload);
    if (!payload.has_value()) return;
    cookie_ = *payload;
    session_.emplace(Role::kClient, payload->cookie);
    phase_ = Phase::kAwaitSh;
    send_hello(/*with_cookie=*/true);
    arm_handshake_timer();
    trace("cookie hello -> " + format_addr(cfg_.server_welcome));
}

void ClientEndpoint::handle_server_hello(const SocketAddr& src) {
    if (phase_ != Phase::kAwaitSh) return;
    server_com_addr_ = src;
    phase_ = Phase::kAwaitSf;
    send_handshake_ack();
    arm_handshake_timer();
    trace("server hello from " + format_addr(src));
}

void ClientEndpoint::handle_server_finished() {
    if (phase_ != Phase::kAwaitSf) return;
    establish(server_com_addr_);
}

void ClientEndpoint::handle_redirect(const std::vector<std::uint8_t>& payload) {
    if (cfg_.variant != Variant::kTcs) return;
    const auto redirect = decode_redirect_payload(payload);
    if (!redirect.has_value()) return;
    if (phase_ == Phase::kAwaitSf) {
        // The redirect is proof the server finished; don't wait for a lost
        // ServerFinished.
        trace("redirect during handshake -> " + format_addr(redirect->target));
        establish(redirect->target);
        return;
    }
    if (phase_ != Phase::kEstablished || redirect->target == server_com_addr_) return;
    trace("redirect -> " + format_addr(redirect->target));
    server_com_addr_ = redirect->target;
    open_active_socket(/*connected=*/true);
    // Anything in flight went to the old address whose replies our freshly
    // connected socket would discard; repeat it toward the new one.
    if (inflight_.has_value()) send_data();
}

void ClientEndpoint::establish(const SocketAddr& com_addr) {
    server_com_addr_ = com_addr;
    phase_ = Phase::kEstablished;
    metrics_.handshakes_completed++;
    established_once_ = true;
    cancel(hs_timer_);
    open_active_socket(/*connected=*/true);
    trace("established, com " + format_addr(server_com_addr_));
    if (inflight_.has_value()) {
        send_data();  // resume the message interrupted by the reconnect
    } else if (metrics_.acked < std::uint64_t(cfg_.total_messages)) {
        begin_next_message();
        send_data();
    }
}

void ClientEndpoint::begin_next_message() {
    assert(!inflight_.has_value());
    inflight_ = Inflight{next_app_id_++, {}, 0, false};
}

void ClientEndpoint::send_data() {
    if (phase_ != Phase::kEstablished || !inflight_.has_value()) return;
    if (!socket_.has_value() || active_up_ip() == std::nullopt) {
        inflight_->want_send = true;
        return;
    }
    std::vector<std::uint8_t> payload;
    payload.reserve(8 + 64);
    put_u64be(payload, inflight_->app_id);
    for (int i = 0; i < 64; ++i)
        payload.push_back(std::uint8_t((inflight_->app_id + std::uint64_t(i)) & 0xff));
    const WireMessage msg = session_->protect(MessageType::kData, std::move(payload));
    inflight_->seqs.push_back(msg.seq);
    if (inflight_->sends > 0) metrics_.data_retransmissions++;
    inflight_->sends++;
    inflight_->want_send = false;
    send_raw(server_com_addr_, msg);
    arm_inflight_timer();
}

void ClientEndpoint::handle_data_ack(const std::vector<std::uint8_t>& payload) {
    if (phase_ != Phase::kEstablished || !inflight_.has_value() || payload.size() != 8) return;
    const std::uint64_t acked_seq = get_u64be(payload);
    bool ours = false;
    for (const std::uint64_t seq : inflight_->seqs) ours = ours || seq == acked_seq;
    if (!ours) return;

    metrics_.acked++;
    if (recovering_since_.has_value()) {
        metrics_.recovery_latency_ms.push_back(io_.now_ms() - *recovering_since_);
        recovering_since_.reset();
    }
    cancel(inflight_timer_);
    inflight_.reset();
    if (metrics_.acked >= std::uint64_t(cfg_.total_messages)) {
        finish();
        return;
    }
    if (cfg_.processing_ms == 0) {
        begin_next_message();
        send_data();
    } else {
        cancel(proc_timer_);
        proc_timer_ = io_.arm_timer(cfg_.processing_ms);
    }
}

void ClientEndpoint::finish() {
    phase_ = Phase::kDone;
    metrics_.done = true;
    metrics_.done_ms = io_.now_ms();
    cancel(hs_timer_);
    cancel(inflight_timer_);
    cancel(proc_timer_);
    trace("done, " + std::to_string(metrics_.acked) + " acks");
}

void ClientEndpoint::teardown_connection() {
    trace("timeout, tearing down connection");
    if (socket_.has_value()) {
        io_.close_socket(*socket_);
        socket_.reset();
    }
    session_.reset();
    cookie_.reset();
    phase_ = Phase::kIdle;
    if (inflight_.has_value()) inflight_->seqs.clear();  // stale under the next session
    start_handshake();
}

void ClientEndpoint::resend_handshake_flight() {
    switch (phase_) {
        case Phase::kAwaitHvr:
            send_hello(false);
            break;
        case Phase::kAwaitSh:
            send_hello(true);
            break;
        case Phase::kAwaitSf:
            send_handshake_ack();
            break;
        default:
            return;
    }
    trace("handshake retransmission");
}

void ClientEndpoint::on_timer(TimerId timer) {
    if (phase_ == Phase::kDone) return;

    if (hs_timer_ == timer) {
        hs_timer_.reset();
        if (!handshaking()) return;
        if (active_up_ip() == std::nullopt) return;  // interface-up will restart
        resend_handshake_flight();
        arm_handshake_timer();
        return;
    }

    if (inflight_timer_ == timer) {
        inflight_timer_.reset();
        if (phase_ != Phase::kEstablished) return;
        if (cfg_.variant == Variant::kBaseline) {
            // The peer's answers stopped: declare the connection interrupted
            // and set up a brand new one.
            teardown_connection();
            return;
        }
        if (!inflight_.has_value()) return;
        if (active_up_ip() == std::nullopt) {
            inflight_->want_send = true;  // interface-up resends
            return;
        }
        trace("data timeout, retransmitting app=" + std::to_string(inflight_->app_id));
        send_data();
        return;
    }

    if (proc_timer_ == timer) {
        proc_timer_.reset();
        if (phase_ != Phase::kEstablished || inflight_.has_value()) return;
        if (metrics_.acked >= std::uint64_t(cfg_.total_messages)) return;
        begin_next_message();
        send_data();
        return;
    }
}

void ClientEndpoint::on_interface_event(IfaceId iface, bool up, std::uint32_t) {
    if (phase_ == Phase::kDone) return;

    if (!up) {
        if (iface != active_iface_) return;  // a standby died; nothing to do
        metrics_.handovers_observed++;
        if (phase_ == Phase::kEstablished) {
            metrics_.handovers_mid_session++;
            if (!recovering_since_.has_value()) recovering_since_ = io_.now_ms();
        }
        if (socket_.has_value()) {
            io_.close_socket(*socket_);
            socket_.reset();
        }
        if (cfg_.variant == Variant::kBaseline) {
            if (handshaking()) {
                phase_ = Phase::kIdle;
                want_handshake_ = true;
            } else if (phase_ == Phase::kEstablished && !inflight_timer_.has_value()) {
                // Nothing was in flight; the next send would fail. Model the
                // application noticing the dead link after its usual timeout.
                arm_inflight_timer();
            }
            return;
        }
        const std::optional<IfaceId> other = other_up_iface(iface);
        if (!other.has_value()) {
            if (handshaking()) {
                phase_ = Phase::kIdle;
                want_handshake_ = true;
            }
            return;  // single-homed: recover at interface-up
        }
        active_iface_ = *other;
        trace("failover to iface " + std::to_string(*other));
        if (phase_ == Phase::kEstablished) {
            open_active_socket(/*connected=*/true);
            if (inflight_.has_value()) send_data();
        } else if (handshaking() || want_handshake_) {
            start_handshake();
        }
        return;
    }

    // Interface (re)activated.
    if (socket_.has_value() && iface != active_iface_) return;  // healthy standby return
    if (!socket_.has_value()) active_iface_ = iface;            // adopt the only live interface
    if (want_handshake_) {
        start_handshake();
        return;
    }
    if (phase_ == Phase::kEstablished && cfg_.variant != Variant::kBaseline) {
        open_active_socket(/*connected=*/true);
        if (inflight_.has_value()) send_data();
    }
    // Baseline recovers through its application timeout alone.
}

}  // namespace fastresume
