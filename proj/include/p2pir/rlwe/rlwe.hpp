#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/rlwe/ring.hpp"

namespace p2pir::rlwe {

// kDegree coefficients in [0, t).
using Plaintext = std::vector<std::uint64_t>;

struct SecretKey {
    std::vector<std::int64_t> coeffs;  // ternary
    RnsPoly ntt;                       // both limbs, transformed
};

SecretKey generate_secret_key(Prg& rng);

// Decrypts as b + a*s. When `seed` is set, `a` is the expansion of the seed
// and is omitted on the wire.
struct Ciphertext {
    RnsPoly b;
    RnsPoly a;
    std::optional<Seed> seed;

    std::size_t limbs() const { return b.limbs; }
    bool ntt_form() const { return b.ntt_form; }
};

// Fresh seeded encryption over the first `limbs` primes, coefficient form.
Ciphertext encrypt(const SecretKey& sk, const Plaintext& m, std::size_t limbs, Prg& rng);
Plaintext decrypt(const SecretKey& sk, const Ciphertext& ct);

// log2 of the largest coefficient of the residual noise relative to the
// expected plaintext, and log2 of the decryption threshold Q/(2t).
double noise_bits(const SecretKey& sk, const Ciphertext& ct, const Plaintext& expected);
double noise_threshold_bits(std::size_t limbs);

// Drops the special prime with rounding; result is in transformed form.
void mod_switch_to_data(Ciphertext& ct);
// Brings a ciphertext to the data prime in transformed form.
void prepare_for_evaluation(Ciphertext& ct);

void to_ntt(Ciphertext& ct);
void from_ntt(Ciphertext& ct);
void add_inplace(Ciphertext& x, const Ciphertext& y);
void sub_inplace(Ciphertext& x, const Ciphertext& y);
// Multiplies by a plaintext lifted with centered coefficients.
void multiply_plain_inplace(Ciphertext& ct, const Plaintext& p);
Ciphertext zero_ciphertext(std::size_t limbs, bool ntt);

// Centered lift of a plaintext into transformed form over `limbs` primes.
RnsPoly lift_plaintext(const Plaintext& p, std::size_t limbs);

// Wire layout: flag byte (1 = seeded), limb count byte, then for a seeded
// ciphertext the 32-byte seed followed by b; otherwise b then a. Each
// polynomial is limb-major little-endian 8-byte coefficients.
Bytes serialize(const Ciphertext& ct);
void serialize_into(ByteWriter& w, const Ciphertext& ct);
Ciphertext deserialize_ciphertext(ByteReader& r);
Ciphertext deserialize_ciphertext(ByteSpan data);

void write_poly(ByteWriter& w, const RnsPoly& p);
RnsPoly read_poly(ByteReader& r, std::size_t limbs);

}  // namespace p2pir::rlwe
