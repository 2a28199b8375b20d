#pragma once

#include <cstddef>
#include <cstdint>

namespace p2pir::rlwe {

inline constexpr std::size_t kLogDegree = 12;
inline constexpr std::size_t kDegree = std::size_t{1} << kLogDegree;
inline constexpr std::uint32_t kTwoN = 2 * kDegree;

// Plaintext modulus: prime, 40961 = 5 * 8192 + 1.
inline constexpr std::uint64_t kPlainModulus = 40961;

// Smallest primes >= 2^53 and >= 2^54 that are 1 mod 2N.
inline constexpr std::uint64_t kDataPrime = 9007199254781953ULL;      // 2^53 + 40961
inline constexpr std::uint64_t kSpecialPrime = 18014398509506561ULL;  // 2^54 + 24577
inline constexpr std::uint64_t kDataPrimeGenerator = 5;
inline constexpr std::uint64_t kSpecialPrimeGenerator = 3;

// Centered binomial noise with eta = 21 has variance 10.5 (sigma ~ 3.24).
inline constexpr int kNoiseEta = 21;

inline constexpr std::size_t kPolyBytes = kDegree * 8;

}  // namespace p2pir::rlwe
