#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "p2pir/common/bytes.hpp"

namespace p2pir {

// 256-bit identifier in the XOR address space. Ordering is the big-endian
// integer order, so comparing two XOR distances compares closeness.
struct Id256 {
    std::array<std::uint8_t, 32> bytes{};

    static Id256 hash_of(ByteSpan data);  // SHA-256
    static Id256 from_span(ByteSpan data);
    static Id256 from_hex(const std::string& hex);

    ByteSpan span() const { return ByteSpan(bytes.data(), bytes.size()); }
    std::string hex() const;
    bool bit(std::size_t i) const { return (bytes[i / 8] >> (7 - i % 8)) & 1; }
    void set_bit(std::size_t i, bool v);

    auto operator<=>(const Id256&) const = default;
};

Id256 operator^(const Id256& a, const Id256& b);

// Number of leading bits shared; 256 for identical ids.
int cpl(const Id256& a, const Id256& b);

// True if a is strictly closer to target than b.
inline bool closer(const Id256& target, const Id256& a, const Id256& b) { return (a ^ target) < (b ^ target); }

template <typename R>
Id256 random_id(R& rng) {
    Id256 id;
    rng.fill(id.bytes);
    return id;
}

struct Id256Hash {
    std::size_t operator()(const Id256& id) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | id.bytes[i];
        return h;
    }
};

using PeerId = Id256;
using Cid = Id256;

}  // namespace p2pir
