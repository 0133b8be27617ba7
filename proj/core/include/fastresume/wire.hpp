// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Wire format shared by every handshake and data message:
//
//   offset  size  field
//   0       1     version (= 1)
//   1       1     message type
//   2       8     session id (all-zero before a session exists)
//   10      8     sequence number, big-endian
//   18      2     payload length, big-endian
//   20      L     payload
//   20+L    16    MAC (all-zero on the first ClientHello and on
//                 HelloVerifyRequest, which precede key material)
//
// Total encoded size is exactly 36 + L bytes.

#ifndef FASTRESUME_WIRE_HPP_
#define FASTRESUME_WIRE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastresume/result.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

enum class MessageType : std::uint8_t {
    kClientHello = 0x01,
    kHelloVerifyRequest = 0x02,
    kServerHello = 0x03,
    kHandshakeAck = 0x04,
    kServerFinished = 0x05,
    kAddressRedirect = 0x06,
    kData = 0x10,
    kDataAck = 0x11,
};

constexpr std::uint8_t kWireVersion = 1;
constexpr std::size_t kWireOverhead = 36;
constexpr std::size_t kMacSize = 16;
constexpr std::size_t kMaxPayload = 65535;

const char* to_string(MessageType type);
bool is_valid_message_type(std::uint8_t code);

/// Handshake flights proper: ClientHello through ServerFinished.
/// AddressRedirect is post-handshake redirect machinery and Data/DataAck are
/// application traffic; neither counts as a handshake flight.
bool is_handshake_type(MessageType type);

struct WireMessage {
    std::uint8_t version = kWireVersion;
    MessageType type = MessageType::kData;
    std::uint64_t session_id = 0;
    std::uint64_t seq = 0;
    std::vector<std::uint8_t> payload;
    std::array<std::uint8_t, kMacSize> mac{};

    bool operator==(const WireMessage&) const = default;
};

enum class EncodeError {
    kPayloadTooLarge,
};

enum class DecodeError {
    kShortBuffer,
    kUnknownVersion,
    kUnknownType,
    kLengthMismatch,
};

const char* to_string(EncodeError error);
const char* to_string(DecodeError error);

Result<std::vector<std::uint8_t>, EncodeError> encode(const WireMessage& msg);

/// Total on arbitrary input: returns a typed error, never throws.
Result<WireMessage, DecodeError> decode(std::span<const std::uint8_t> bytes);

/// One-line trace rendering: type, session id hex, seq, payload length.
std::string describe(const WireMessage& msg);

// Fixed payload layouts.

/// HelloVerifyRequest and the cookie-bearing ClientHello carry the 32-byte
/// cookie followed by the 8-byte nonce that keeps verification stateless.
struct CookiePayload {
    std::array<std::uint8_t, 32> cookie{};
    std::array<std::uint8_t, 8> nonce{};
};
constexpr std::size_t kCookiePayloadSize = 40;

std::vector<std::uint8_t> encode_cookie_payload(const CookiePayload& p);
std::optional<CookiePayload> decode_cookie_payload(std::span<const std::uint8_t> payload);

/// AddressRedirect payload: the address the client must use from now on.
struct RedirectPayload {
    SocketAddr target;
};
constexpr std::size_t kRedirectPayloadSize = 6;

std::vector<std::uint8_t> encode_redirect_payload(const RedirectPayload& p);
std::optional<RedirectPayload> decode_redirect_payload(std::span<const std::uint8_t> payload);

// Big-endian integer helpers used across payload layouts.
void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u64be(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint16_t get_u16be(std::span<const std::uint8_t> in);
std::uint64_t get_u64be(std::span<const std::uint8_t> in);

}  // namespace fastresume

#endif  // FASTRESUME_WIRE_HPP_
