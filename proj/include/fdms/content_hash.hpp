#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "fdms/error.hpp"

namespace fdms {

/// Name of the digest written next to every stored hash.
inline constexpr std::string_view kHashAlgorithm = "sha256";

/// SHA-256 of `bytes` as lowercase hex.
inline std::string content_hash(std::span<const std::uint8_t> bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::IoError, "sha256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

inline std::string content_hash(std::string_view text)
{
    return content_hash(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace fdms
