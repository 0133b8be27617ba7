// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cassert>

namespace fastresume {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    const int rc = EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
    assert(rc == 1 && len == out.size());
    (void)rc;
    return out;
}

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    const unsigned char* rc = HMAC(EVP_sha256(), key.data(), int(key.size()), data.data(),
                                   data.size(), out.data(), &len);
    assert(rc != nullptr && len == out.size());
    (void)rc;
    return out;
}

bool ct_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) return false;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace fastresume
