#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "p2pir/common/bytes.hpp"

namespace p2pir::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteSpan data);
Digest hmac_sha256(ByteSpan key, ByteSpan data);
// RFC 5869 HKDF with SHA-256, empty salt.
Bytes hkdf_sha256(ByteSpan ikm, std::string_view info, std::size_t out_len);
// SHAKE256 output of `out_len` bytes.
Bytes shake256(ByteSpan data, std::size_t out_len);
// Seed for a numeric experiment seed: SHA-256 of its 8-byte big-endian form.
std::array<std::uint8_t, 32> seed_from_u64(std::uint64_t seed);
// Constant-time comparison of equal-length buffers.
bool equal_ct(ByteSpan a, ByteSpan b);

// Raw AES-256-CTR transform; iv is the 16-byte initial counter block.
void aes256_ctr(ByteSpan key, ByteSpan iv, ByteSpan in, std::uint8_t* out);

}  // namespace p2pir::crypto
