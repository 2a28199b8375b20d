#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/id.hpp"

namespace p2pir::crypto {

inline constexpr std::string_view kLabelProviderAds = "provider-ads";
inline constexpr std::string_view kLabelWantHave = "wanthave-index";
inline constexpr std::string_view kLabelContentBlock = "content-block";

using SymKey = std::array<std::uint8_t, 32>;

// HKDF-SHA256 of the CID with the label as context info. Throws
// InvalidArgument on labels other than the three above.
SymKey kdf(const Cid& c, std::string_view label);

// Key-committing authenticated encryption: AES-256-CTR then HMAC-SHA256
// under separately derived keys, the MAC also covering a commitment to the
// key. The nonce is derived from the plaintext, so encryption is
// deterministic per (key, plaintext). Layout: nonce(16) || body || tag(32).
class RobustCipher {
public:
    static constexpr std::size_t kNonceBytes = 16;
    static constexpr std::size_t kTagBytes = 32;
    static constexpr std::size_t kOverhead = kNonceBytes + kTagBytes;

    explicit RobustCipher(const SymKey& key);

    Bytes encrypt(ByteSpan plaintext) const;
    // nullopt whenever the key or ciphertext is wrong.
    std::optional<Bytes> decrypt(ByteSpan ciphertext) const;

private:
    Bytes tag(ByteSpan nonce, ByteSpan body) const;

    Bytes enc_key_, mac_key_, nonce_key_, commitment_;
};

}  // namespace p2pir::crypto
