// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/wire.hpp"

#include <algorithm>
#include <cstdio>

namespace fastresume {

const char* to_string(MessageType type) {
    switch (type) {
        case MessageType::kClientHello: return "client_hello";
        case MessageType::kHelloVerifyRequest: return "hello_verify_request";
        case MessageType::kServerHello: return "server_hello";
        case MessageType::kHandshakeAck: return "handshake_ack";
        case MessageType::kServerFinished: return "server_finished";
        case MessageType::kAddressRedirect: return "address_redirect";
        case MessageType::kData: return "data";
        case MessageType::kDataAck: return "data_ack";
    }
    return "unknown";
}

bool is_valid_message_type(std::uint8_t code) {
    switch (code) {
        case 0x01:
        case 0x02:
        case 0x03:
        case 0x04:
        case 0x05:
        case 0x06:
        case 0x10:
        case 0x11:
            return true;
        default:
            return false;
    }
}

bool is_handshake_type(MessageType type) {
    switch (type) {
        case MessageType::kClientHello:
        case MessageType::kHelloVerifyRequest:
        case MessageType::kServerHello:
        case MessageType::kHandshakeAck:
        case MessageType::kServerFinished:
            return true;
        default:
            return false;
    }
}

const char* to_string(EncodeError error) {
    switch (error) {
        case EncodeError::kPayloadTooLarge: return "payload_too_large";
    }
    return "unknown";
}

const char* to_string(DecodeError error) {
    switch (error) {
        case DecodeError::kShortBuffer: return "short_buffer";
        case DecodeError::kUnknownVersion: return "unknown_version";
        case DecodeError::kUnknownType: return "unknown_type";
        case DecodeError::kLengthMismatch: return "length_mismatch";
    }
    return "unknown";
}

void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void put_u64be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(std::uint8_t(v >> shift));
}

std::uint16_t get_u16be(std::span<const std::uint8_t> in) {
    return std::uint16_t((std::uint16_t(in[0]) << 8) | in[1]);
}

std::uint64_t get_u64be(std::span<const std::uint8_t> in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
    return v;
}

Result<std::vector<std::uint8_t>, EncodeError> encode(const WireMessage& msg) {
    if (msg.payload.size() > kMaxPayload) return EncodeError::kPayloadTooLarge;

    std::vector<std::uint8_t> out;
    out.reserve(kWireOverhead + msg.payload.size());
    out.push_back(msg.version);
    out.push_back(std::uint8_t(msg.type));
    put_u64be(out, msg.session_id);
    put_u64be(out, msg.seq);
    put_u16be(out, std::uint16_t(msg.payload.size()));
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    out.insert(out.end(), msg.mac.begin(), msg.mac.end());
    return out;
}

Result<WireMessage, DecodeError> decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kWireOverhead) return DecodeError::kShortBuffer;
    if (bytes[0] != kWireVersion) return DecodeError::kUnknownVersion;
    if (!is_valid_message_type(bytes[1])) return DecodeError::kUnknownType;

    const std::uint16_t payload_len = get_u16be(bytes.subspan(18, 2));
    if (bytes.size() != kWireOverhead + payload_len) return DecodeError::kLengthMismatch;

    WireMessage msg;
    msg.version = bytes[0];
    msg.type = MessageType(bytes[1]);
    msg.session_id = get_u64be(bytes.subspan(2, 8));
    msg.seq = get_u64be(bytes.subspan(10, 8));
    msg.payload.assign(bytes.begin() + 20, bytes.begin() + 20 + payload_len);
    std::copy_n(bytes.begin() + 20 + payload_len, kMacSize, msg.mac.begin());
    return msg;
}

std::string describe(const WireMessage& msg) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s sid=%016llx seq=%llu len=%zu", to_string(msg.type),
                  static_cast<unsigned long long>(msg.session_id),
                  static_cast<unsigned long long>(msg.seq), msg.payload.size());
    return buf;
}

std::vector<std::uint8_t> encode_cookie_payload(const CookiePayload& p) {
    std::vector<std::uint8_t> out;
    out.reserve(kCookiePayloadSize);
    out.insert(out.end(), p.cookie.begin(), p.cookie.end());
    out.insert(out.end(), p.nonce.begin(), p.nonce.end());
    return out;
}

std::optional<CookiePayload> decode_cookie_payload(std::span<const std::uint8_t> payload) {
    if (payload.size() != kCookiePayloadSize) return std::nullopt;
    CookiePayload p;
    std::copy_n(payload.begin(), p.cookie.size(), p.cookie.begin());
    std::copy_n(payload.begin() + p.cookie.size(), p.nonce.size(), p.nonce.begin());
    return p;
}

std::vector<std::uint8_t> encode_redirect_payload(const RedirectPayload& p) {
    std::vector<std::uint8_t> out;
    out.reserve(kRedirectPayloadSize);
    out.push_back(std::uint8_t(p.target.ip >> 24));
    out.push_back(std::uint8_t(p.target.ip >> 16));
    out.push_back(std::uint8_t(p.target.ip >> 8));
    out.push_back(std::uint8_t(p.target.ip));
    put_u16be(out, p.target.port);
    return out;
}

std::optional<RedirectPayload> decode_redirect_payload(std::span<const std::uint8_t> payload) {
    if (payload.size() != kRedirectPayloadSize) return std::nullopt;
    RedirectPayload p;
    p.target.ip = (std::uint32_t(payload[0]) << 24) | (std::uint32_t(payload[1]) << 16) |
                  (std::uint32_t(payload[2]) << 8) | std::uint32_t(payload[3]);
    p.target.port = get_u16be(payload.subspan(4, 2));
    return p;
}

}  // namespace fastresume
