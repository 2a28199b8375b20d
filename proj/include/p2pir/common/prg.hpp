#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "p2pir/common/bytes.hpp"

namespace p2pir {

using Seed = std::array<std::uint8_t, 32>;

// AES-256-CTR keystream generator keyed by a 32-byte seed.
// A `stream` number selects independent streams under the same seed.
class Prg {
public:
    explicit Prg(const Seed& seed, std::uint64_t stream = 0);
    ~Prg();
    Prg(Prg&&) noexcept;
    Prg& operator=(Prg&&) noexcept;
    Prg(const Prg&) = delete;
    Prg& operator=(const Prg&) = delete;

    static Prg from_entropy();

    void fill(std::span<std::uint8_t> out);
    std::uint64_t next_u64();
    std::uint32_t next_u32();
    // Uniform in [0, bound); bound > 0.
    std::uint64_t uniform(std::uint64_t bound);
    Seed next_seed();

private:
    void refill();

    struct Cipher;
    std::unique_ptr<Cipher> cipher_;
    std::array<std::uint8_t, 4096> buf_{};
    std::size_t pos_ = 0;
};

// 32 bytes from the operating system CSPRNG.
Seed random_seed();

}  // namespace p2pir
