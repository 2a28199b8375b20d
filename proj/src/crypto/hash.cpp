#include "p2pir/crypto/hash.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>

#include <memory>

#include "p2pir/common/errors.hpp"

namespace p2pir::crypto {

namespace {

struct MdCtxFree {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct PkeyCtxFree {
    void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};
struct CipherCtxFree {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

void check(int rc, const char* what) {
    if (rc != 1) throw CryptoBackendError(what);
}

}  // namespace

Digest sha256(ByteSpan data) {
    Digest out;
    unsigned len = 0;
    check(EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr),
          "sha256 failed");
    return out;
}

Digest hmac_sha256(ByteSpan key, ByteSpan data) {
    Digest out;
    unsigned len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
              out.data(), &len))
        throw CryptoBackendError("hmac failed");
    return out;
}

std::array<std::uint8_t, 32> seed_from_u64(std::uint64_t seed) {
    std::uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    return sha256(ByteSpan(buf, 8));
}

Bytes hkdf_sha256(ByteSpan ikm, std::string_view info, std::size_t out_len) {
    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree> ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
    if (!ctx) throw CryptoBackendError("hkdf context");
    check(EVP_PKEY_derive_init(ctx.get()), "hkdf init");
    check(EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()), "hkdf md");
    check(EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), ikm.data(), static_cast<int>(ikm.size())),
          "hkdf key");
    check(EVP_PKEY_CTX_add1_hkdf_info(ctx.get(),
                                      reinterpret_cast<const unsigned char*>(info.data()),
                                      static_cast<int>(info.size())),
          "hkdf info");
    Bytes out(out_len);
    std::size_t len = out_len;
    check(EVP_PKEY_derive(ctx.get(), out.data(), &len), "hkdf derive");
    return out;
}

Bytes shake256(ByteSpan data, std::size_t out_len) {
    std::unique_ptr<EVP_MD_CTX, MdCtxFree> ctx(EVP_MD_CTX_new());
    check(EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr), "shake init");
    check(EVP_DigestUpdate(ctx.get(), data.data(), data.size()), "shake update");
    Bytes out(out_len);
    check(EVP_DigestFinalXOF(ctx.get(), out.data(), out_len), "shake final");
    return out;
}

bool equal_ct(ByteSpan a, ByteSpan b) {
    return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

void aes256_ctr(ByteSpan key, ByteSpan iv, ByteSpan in, std::uint8_t* out) {
    if (key.size() != 32 || iv.size() != 16) throw InvalidArgument("aes256_ctr key/iv size");
    std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree> ctx(EVP_CIPHER_CTX_new());
    check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, key.data(), iv.data()),
          "aes init");
    std::size_t done = 0;
    while (done < in.size()) {
        int chunk = static_cast<int>(std::min<std::size_t>(in.size() - done, 1 << 30));
        int outl = 0;
        check(EVP_EncryptUpdate(ctx.get(), out + done, &outl, in.data() + done, chunk), "aes");
        done += static_cast<std::size_t>(chunk);
    }
}

}  // namespace p2pir::crypto
