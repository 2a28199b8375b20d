#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"

namespace p2pir::paillier {

inline constexpr unsigned kModulusBits = 3072;
inline constexpr std::size_t kModulusBytes = kModulusBits / 8;           // 384
inline constexpr std::size_t kCiphertextBytes = 2 * kModulusBytes;       // 768
inline constexpr unsigned kSecurityLevel = 128;

struct PublicKey {
    mpz_class n;   // modulus M
    mpz_class n2;  // M^2
    mpz_class g;   // M + 1
    std::uint64_t tag = 0;

    static PublicKey from_modulus(const mpz_class& n);
};

struct SecretKey {
    mpz_class p, q, p2, q2;
    mpz_class p_minus_1, q_minus_1;
    mpz_class hp, hq;      // L_p(g^(p-1) mod p^2)^-1 mod p, likewise for q
    mpz_class p_inv_q;     // p^-1 mod q
};

struct KeyPair {
    PublicKey pk;
    SecretKey sk;
};

struct Ciphertext {
    mpz_class value;
    std::uint64_t tag = 0;  // identifies the modulus it lives under
};

KeyPair keygen(Prg& rng, unsigned modulus_bits = kModulusBits);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Prg& rng);
mpz_class decrypt(const KeyPair& kp, const mpz_class& c);
mpz_class decrypt(const KeyPair& kp, const Ciphertext& c);

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext add_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m);
Ciphertext scal_mult(const PublicKey& pk, const Ciphertext& a, const mpz_class& s);

// prod_j bases[j]^exps[j] mod modulus (bucket method).
mpz_class multi_exp(std::span<const mpz_class> bases, std::span<const mpz_class> exps,
                    const mpz_class& modulus);

// Big-endian fixed-width conversion.
Bytes to_bytes(const mpz_class& v, std::size_t width);
mpz_class from_bytes(ByteSpan b);

// Uniform integer of `bits` bits from the generator.
mpz_class random_bits(Prg& rng, unsigned bits);
mpz_class random_below(Prg& rng, const mpz_class& bound);

}  // namespace p2pir::paillier
