#pragma once

#include <cstdint>

namespace p2pir::rlwe {

using u128 = unsigned __int128;

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    std::uint64_t s = a + b;
    return s >= q ? s - q : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return a >= b ? a - b : a + q - b;
}

inline std::uint64_t neg_mod(std::uint64_t a, std::uint64_t q) { return a == 0 ? 0 : q - a; }

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % q);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);
// Inverse modulo a prime.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q);
// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);

// Precomputed floor(w * 2^64 / q) for multiplication by the constant w.
inline std::uint64_t shoup(std::uint64_t w, std::uint64_t q) {
    return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / q);
}

// x * w mod q, result in [0, 2q). Requires w < q.
inline std::uint64_t mul_shoup_lazy(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup,
                                    std::uint64_t q) {
    std::uint64_t hi = static_cast<std::uint64_t>((static_cast<u128>(x) * w_shoup) >> 64);
    return x * w - hi * q;
}

inline std::uint64_t mul_shoup(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup,
                               std::uint64_t q) {
    std::uint64_t r = mul_shoup_lazy(x, w, w_shoup, q);
    return r >= q ? r - q : r;
}

// Maps a residue mod `from` to its centered representative reduced mod `to`.
inline std::uint64_t centered_lift(std::uint64_t x, std::uint64_t from, std::uint64_t to) {
    if (x > from / 2) {
        std::uint64_t neg = from - x;
        neg %= to;
        return neg == 0 ? 0 : to - neg;
    }
    return x % to;
}

}  // namespace p2pir::rlwe
