// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef FASTRESUME_CRYPTO_HPP_
#define FASTRESUME_CRYPTO_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace fastresume {

/// SHA-256 digest of `data`.
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

/// HMAC-SHA256 of `data` under `key`.
std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data);

/// Constant-time equality for MAC comparison.
bool ct_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace fastresume

#endif  // FASTRESUME_CRYPTO_HPP_
