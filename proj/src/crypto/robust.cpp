#include "p2pir/crypto/robust.hpp"

#include <cstring>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/hash.hpp"

namespace p2pir::crypto {

SymKey kdf(const Cid& c, std::string_view label) {
    if (label != kLabelProviderAds && label != kLabelWantHave && label != kLabelContentBlock)
        throw InvalidArgument("unknown key derivation label");
    Bytes k = hkdf_sha256(c.span(), label, 32);
    SymKey out;
    std::memcpy(out.data(), k.data(), 32);
    return out;
}

RobustCipher::RobustCipher(const SymKey& key)
    : enc_key_(hkdf_sha256(key, "robust-enc", 32)),
      mac_key_(hkdf_sha256(key, "robust-mac", 32)),
      nonce_key_(hkdf_sha256(key, "robust-nonce", 32)),
      commitment_(hkdf_sha256(key, "robust-commit", 32)) {}

Bytes RobustCipher::tag(ByteSpan nonce, ByteSpan body) const {
    Bytes msg;
    msg.reserve(commitment_.size() + nonce.size() + body.size());
    msg.insert(msg.end(), commitment_.begin(), commitment_.end());
    msg.insert(msg.end(), nonce.begin(), nonce.end());
    msg.insert(msg.end(), body.begin(), body.end());
    Digest d = hmac_sha256(mac_key_, msg);
    return Bytes(d.begin(), d.end());
}

Bytes RobustCipher::encrypt(ByteSpan plaintext) const {
    Digest n = hmac_sha256(nonce_key_, plaintext);
    Bytes out(kOverhead + plaintext.size());
    std::memcpy(out.data(), n.data(), kNonceBytes);
    ByteSpan nonce(out.data(), kNonceBytes);
    if (!plaintext.empty()) aes256_ctr(enc_key_, nonce, plaintext, out.data() + kNonceBytes);
    Bytes t = tag(nonce, ByteSpan(out.data() + kNonceBytes, plaintext.size()));
    std::memcpy(out.data() + kNonceBytes + plaintext.size(), t.data(), kTagBytes);
    return out;
}

std::optional<Bytes> RobustCipher::decrypt(ByteSpan ciphertext) const {
    if (ciphertext.size() < kOverhead) return std::nullopt;
    ByteSpan nonce = ciphertext.first(kNonceBytes);
    ByteSpan body = ciphertext.subspan(kNonceBytes, ciphertext.size() - kOverhead);
    ByteSpan received = ciphertext.last(kTagBytes);
    if (!equal_ct(tag(nonce, body), received)) return std::nullopt;
    Bytes out(body.size());
    if (!body.empty()) aes256_ctr(enc_key_, nonce, body, out.data());
    return out;
}

}  // namespace p2pir::crypto
