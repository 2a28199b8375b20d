#include "p2pir/common/prg.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>

#include "p2pir/common/errors.hpp"

namespace p2pir {

struct Prg::Cipher {
    EVP_CIPHER_CTX* ctx = nullptr;
    ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

Prg::Prg(const Seed& seed, std::uint64_t stream) : cipher_(std::make_unique<Cipher>()) {
    cipher_->ctx = EVP_CIPHER_CTX_new();
    if (!cipher_->ctx) throw CryptoBackendError("EVP_CIPHER_CTX_new failed");
    std::uint8_t iv[16] = {};
    for (int i = 0; i < 8; ++i) iv[i] = static_cast<std::uint8_t>(stream >> (56 - 8 * i));
    if (EVP_EncryptInit_ex(cipher_->ctx, EVP_aes_256_ctr(), nullptr, seed.data(), iv) != 1)
        throw CryptoBackendError("AES-CTR init failed");
    refill();
}

Prg::~Prg() = default;
Prg::Prg(Prg&&) noexcept = default;
Prg& Prg::operator=(Prg&&) noexcept = default;

Prg Prg::from_entropy() { return Prg(random_seed()); }

void Prg::refill() {
    static const std::array<std::uint8_t, 4096> zeros{};
    int outl = 0;
    if (EVP_EncryptUpdate(cipher_->ctx, buf_.data(), &outl, zeros.data(),
                          static_cast<int>(zeros.size())) != 1)
        throw CryptoBackendError("AES-CTR update failed");
    pos_ = 0;
}

void Prg::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pos_ == buf_.size()) refill();
        std::size_t n = std::min(out.size() - done, buf_.size() - pos_);
        std::memcpy(out.data() + done, buf_.data() + pos_, n);
        pos_ += n;
        done += n;
    }
}

std::uint64_t Prg::next_u64() {
    std::uint8_t b[8];
    fill(b);
    std::uint64_t v;
    std::memcpy(&v, b, 8);
    return v;
}

std::uint32_t Prg::next_u32() { return static_cast<std::uint32_t>(next_u64()); }

std::uint64_t Prg::uniform(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("uniform bound must be positive");
    // Rejection sampling on the largest multiple of bound.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

Seed Prg::next_seed() {
    Seed s;
    fill(s);
    return s;
}

Seed random_seed() {
    Seed s;
    if (RAND_bytes(s.data(), static_cast<int>(s.size())) != 1)
        throw CryptoBackendError("RAND_bytes failed");
    return s;
}

}  // namespace p2pir
