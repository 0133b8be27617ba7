// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/server.hpp"

#include <cassert>
#include <cstdio>

namespace fastresume {

namespace {

std::string sid_hex(std::uint64_t sid) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(sid));
    return buf;
}

}  // namespace

const char* to_string(Variant variant) {
    switch (variant) {
        case Variant::kBaseline: return "baseline";
        case Variant::kIpc: return "ipc";
        case Variant::kTcs: return "tcs";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(const std::string& text) {
    if (text == "baseline") return Variant::kBaseline;
    if (text == "ipc") return Variant::kIpc;
    if (text == "tcs") return Variant::kTcs;
    return std::nullopt;
}

std::optional<std::uint16_t> PortAllocator::allocate(
    const std::function<bool(std::uint16_t)>& in_use) {
    const std::uint32_t span = std::uint32_t(end_ - begin_) + 1;
    for (std::uint32_t i = 0; i < span; ++i) {
        const std::uint16_t candidate = next_;
        next_ = candidate == end_ ? begin_ : std::uint16_t(candidate + 1);
        if (!in_use(candidate)) return candidate;
    }
    return std::nullopt;
}

ServerEndpoint::ServerEndpoint(Transport& io, ServerConfig cfg)
    : io_(io),
      cfg_(cfg),
      rng_(Rng::derive_seed(cfg.seed, /*purpose=*/0x5e1f5e1f)),
      secret_(ServerSecret::from_rng(rng_)),
      ports_(cfg.port_range_begin, cfg.port_range_end) {}

void ServerEndpoint::trace(const std::string& line, const SessionState* state) {
    io_.trace("SRV " + std::string(to_string(cfg_.variant)) + " " +
              (state != nullptr ? sid_hex(state->sess.session_id()) : "-") + " " + line);
}

void ServerEndpoint::start() {
    const auto sock = io_.open_socket(cfg_.welcome_addr);
    assert(sock.ok());
    welcome_socket_ = sock.value();
    ports_in_use_.insert(cfg_.welcome_addr.port);
    trace("listening on " + format_addr(cfg_.welcome_addr));
}

std::optional<std::uint16_t> ServerEndpoint::allocate_port() {
    const auto port =
        ports_.allocate([this](std::uint16_t p) { return ports_in_use_.contains(p); });
    if (port.has_value()) ports_in_use_.insert(*port);
    return port;
}

void ServerEndpoint::note_established(SessionState& state) {
    metrics_.handshakes_completed++;
    established_once_ = true;
    touch(state);
}

void ServerEndpoint::touch(SessionState& state) { state.last_activity = io_.now_ms(); }

void ServerEndpoint::on_datagram(SocketId sock, const SocketAddr& src,
                                 std::span<const std::uint8_t> bytes) {
    const auto decoded = decode(bytes);
    if (!decoded.ok()) {
        metrics_.drops++;
        trace("drop undecodable from " + format_addr(src));
        return;
    }
    const WireMessage& msg = decoded.value();
    if (msg.type == MessageType::kClientHello) {
        if (msg.payload.empty()) {
            handle_client_hello(msg, src);
        } else {
            handle_cookie_hello(msg, src);
        }
        return;
    }
    handle_session_message(sock, msg, src);
}

void ServerEndpoint::handle_client_hello(const WireMessage&, const SocketAddr& src) {
    // Stateless: everything the server needs later travels inside the cookie
    // payload, so nothing is recorded here.
    const Nonce nonce = rng_.next_bytes<8>();
    const Cookie cookie = generate_cookie(secret_, src, nonce);
    WireMessage hvr;
    hvr.type = MessageType::kHelloVerifyRequest;
    hvr.payload = encode_cookie_payload(CookiePayload{cookie, nonce});
    send_raw(welcome_socket_, src, hvr);
    trace("hello-verify -> " + format_addr(src));
}

void ServerEndpoint::handle_cookie_hello(const WireMessage& msg, const SocketAddr& src) {
    const auto payload = decode_cookie_payload(msg.payload);
    if (!payload.has_value()) {
        metrics_.drops++;
        trace("drop malformed cookie hello from " + format_addr(src));
        return;
    }
    if (!verify_cookie(secret_, src, payload->nonce, payload->cookie)) {
        metrics_.drops++;
        trace("drop cookie mismatch from " + format_addr(src));
        return;
    }

    Session session(Role::kServer, payload->cookie);
    const std::uint64_t sid = session.session_id();
    const bool is_new = !sessions_.contains(sid);
    if (is_new) sessions_.emplace(sid, SessionState(std::move(session)));
    SessionState& state = sessions_.at(sid);

    if (!state.sess.unprotect(msg, src).ok()) {
        metrics_.drops++;
        trace("drop bad client hello mac from " + format_addr(src), &state);
        if (is_new) sessions_.erase(sid);
        return;
    }
    touch(state);
    state.client_hint = src;

    if (!is_new) {
        // Client retransmission: the ServerHello evidently did not arrive, so
        // repeat it from the socket the handshake lives on.
        const SocketId from = state.temp_socket.value_or(state.com_socket.value_or(welcome_socket_));
        send_protected(state, from, src, MessageType::kServerHello, {});
        trace("server-hello (again) -> " + format_addr(src), &state);
        return;
    }

    switch (cfg_.variant) {
        case Variant::kBaseline: {
            const auto port = allocate_port();
            assert(port.has_value());
            state.com_addr = SocketAddr{cfg_.welcome_addr.ip, *port};
            const auto com = io_.open_connected(state.com_addr, src);
            assert(com.ok());
            state.com_socket = com.value();
            state.idle_timer = io_.arm_timer(cfg_.idle_timeout_ms);
            timer_sessions_[*state.idle_timer] = sid;
            break;
        }
        case Variant::kIpc: {
            const auto port = allocate_port();
            assert(port.has_value());
            state.com_addr = SocketAddr{cfg_.welcome_addr.ip, *port};
            const auto com = io_.open_socket(state.com_addr);
            assert(com.ok());
            state.com_socket = com.value();
            break;
        }
        case Variant::kTcs: {
            const auto temp = io_.open_connected(cfg_.welcome_addr, src);
            assert(temp.ok());
            state.temp_socket = temp.value();
            break;
        }
    }
    const SocketId from = state.temp_socket.value_or(state.com_socket.value_or(welcome_socket_));
    send_protected(state, from, src, MessageType::kServerHello, {});
    trace("server-hello -> " + format_addr(src), &state);
}

void ServerEndpoint::handle_session_message(SocketId sock, const WireMessage& msg,
                                            const SocketAddr& src) {
    const auto found = sessions_.find(msg.session_id);
    if (found == sessions_.end()) {
        metrics_.drops++;
        trace("drop unknown session from " + format_addr(src));
        return;
    }
    SessionState& state = found->second;
    const auto payload = state.sess.unprotect(msg, src);
    if (!payload.ok()) {
        metrics_.drops++;
        trace(std::string("drop ") + to_string(payload.error()) + " from " + format_addr(src),
              &state);
        return;
    }
    touch(state);
    state.client_hint = src;

    // First authenticated arrival on the final TCS socket ends the redirect
    // loop: the client has demonstrably switched over.
    if (state.phase == SessionState::Phase::kRedirecting && state.com_socket.has_value() &&
        sock == *state.com_socket) {
        complete_tcs_redirect(state);
    }

    switch (msg.type) {
        case MessageType::kHandshakeAck:
            handle_handshake_ack(state, src);
            break;
        case MessageType::kData:
            handle_data(state, sock, msg, src, payload.value());
            break;
        default:
            metrics_.drops++;
            trace(std::string("drop unexpected ") + to_string(msg.type) + " from " +
                      format_addr(src),
                  &state);
            return;
    }

    // A moved TCS client that never saw the redirect lands on the welcome
    // socket (its old connected temp socket no longer matches the new
    // source); steer it to the final address.
    if (cfg_.variant == Variant::kTcs && sock == welcome_socket_ &&
        state.phase != SessionState::Phase::kAwaitHandshakeAck && state.com_socket.has_value()) {
        send_redirect(state, welcome_socket_, src);
        trace("redirect (welcome path) -> " + format_addr(src), &state);
    }
}

void ServerEndpoint::handle_handshake_ack(SessionState& state, const SocketAddr& src) {
    if (state.phase != SessionState::Phase::kAwaitHandshakeAck) {
        // Duplicate ack means the client is still waiting for the finish.
        const SocketId from = state.temp_socket.value_or(state.com_socket.value_or(welcome_socket_));
        send_protected(state, from, src, MessageType::kServerFinished, {});
        trace("server-finished (again) -> " + format_addr(src), &state);
        return;
    }
    switch (cfg_.variant) {
        case Variant::kBaseline:
        case Variant::kIpc: {
            send_protected(state, *state.com_socket, src, MessageType::kServerFinished, {});
            state.phase = SessionState::Phase::kEstablished;
            note_established(state);
            trace("established", &state);
            break;
        }
        case Variant::kTcs: {
            send_protected(state, *state.temp_socket, src, MessageType::kServerFinished, {});
            const auto port = allocate_port();
            assert(port.has_value());
            state.com_addr = SocketAddr{cfg_.welcome_addr.ip, *port};
            const auto com = io_.open_socket(state.com_addr);
            assert(com.ok());
            state.com_socket = com.value();
            state.phase = SessionState::Phase::kRedirecting;
            note_established(state);
            send_redirect(state, *state.temp_socket, src);
            trace("established, redirecting to " + format_addr(state.com_addr), &state);
            break;
        }
    }
}

void ServerEndpoint::handle_data(SessionState& state, SocketId sock, const WireMessage& msg,
                                 const SocketAddr& src, const std::vector<std::uint8_t>& payload) {
    if (payload.size() < 8) {
        metrics_.drops++;
        trace("drop short data from " + format_addr(src), &state);
        return;
    }
    const std::uint64_t app_id = get_u64be(payload);
    if (app_id > state.highest_app_id) {
        state.highest_app_id = app_id;
    } else {
        trace("duplicate data app=" + std::to_string(app_id), &state);
    }
    std::vector<std::uint8_t> ack;
    put_u64be(ack, msg.seq);
    send_protected(state, sock, src, MessageType::kDataAck, std::move(ack));
    metrics_.acks_sent++;
}

void ServerEndpoint::complete_tcs_redirect(SessionState& state) {
    if (state.redirect_timer.has_value()) {
        io_.cancel_timer(*state.redirect_timer);
        timer_sessions_.erase(*state.redirect_timer);
        state.redirect_timer.reset();
    }
    if (state.temp_socket.has_value()) {
        io_.close_socket(*state.temp_socket);
        state.temp_socket.reset();
    }
    state.phase = SessionState::Phase::kEstablished;
    trace("redirect complete after " + std::to_string(state.redirect_sends) + " sends", &state);
}

void ServerEndpoint::send_redirect(SessionState& state, SocketId sock, const SocketAddr& dst) {
    send_protected(state, sock, dst, MessageType::kAddressRedirect,
                   encode_redirect_payload(RedirectPayload{state.com_addr}));
    state.redirect_sends++;
    metrics_.redirect_transmissions++;
    if (state.phase == SessionState::Phase::kRedirecting) {
        state.redirect_timer = io_.arm_timer(cfg_.redirect_retx_ms);
        timer_sessions_[*state.redirect_timer] = state.sess.session_id();
    }
}

void ServerEndpoint::on_timer(TimerId timer) {
    const auto found = timer_sessions_.find(timer);
    if (found == timer_sessions_.end()) return;
    const std::uint64_t sid = found->second;
    timer_sessions_.erase(found);
    const auto session = sessions_.find(sid);
    if (session == sessions_.end()) return;
    SessionState& state = session->second;

    if (state.idle_timer == timer) {
        state.idle_timer.reset();
        const SimTime idle = io_.now_ms() - state.last_activity;
        if (idle >= cfg_.idle_timeout_ms) {
            trace("idle timeout, tearing down", &state);
            if (state.com_socket.has_value()) {
                io_.close_socket(*state.com_socket);
                ports_in_use_.erase(state.com_addr.port);
            }
            sessions_.erase(sid);
            return;
        }
        state.idle_timer = io_.arm_timer(cfg_.idle_timeout_ms - idle);
        timer_sessions_[*state.idle_timer] = sid;
        return;
    }

    if (state.redirect_timer == timer) {
        state.redirect_timer.reset();
        if (state.phase != SessionState::Phase::kRedirecting) return;
        if (state.redirect_sends >= cfg_.redirect_retx_limit) {
            trace("redirect retry limit, abandoning temp socket", &state);
            if (state.temp_socket.has_value()) {
                io_.close_socket(*state.temp_socket);
                state.temp_socket.reset();
            }
            state.phase = SessionState::Phase::kEstablished;
            return;
        }
        const SocketId from = state.temp_socket.value_or(welcome_socket_);
        send_redirect(state, from, state.sess.peer_addr_hint());
        trace("redirect (retry) -> " + format_addr(state.sess.peer_addr_hint()), &state);
    }
}

void ServerEndpoint::send_protected(SessionState& state, SocketId sock, const SocketAddr& dst,
                                    MessageType type, std::vector<std::uint8_t> payload) {
    send_raw(sock, dst, state.sess.protect(type, std::move(payload)));
}

void ServerEndpoint::send_raw(SocketId sock, const SocketAddr& dst, const WireMessage& msg) {
    if (is_handshake_type(msg.type) && established_once_)
        metrics_.handshake_flights_sent_after_establish++;
    const auto encoded = encode(msg);
    assert(encoded.ok());
    io_.send(sock, dst, encoded.value());
}

}  // namespace fastresume
