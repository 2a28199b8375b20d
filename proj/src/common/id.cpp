#include "p2pir/common/id.hpp"

#include <bit>
#include <cstring>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/hash.hpp"

namespace p2pir {

Id256 Id256::hash_of(ByteSpan data) {
    Id256 id;
    auto d = crypto::sha256(data);
    std::memcpy(id.bytes.data(), d.data(), 32);
    return id;
}

Id256 Id256::from_span(ByteSpan data) {
    if (data.size() != 32) throw InvalidArgument("identifier must be 32 bytes");
    Id256 id;
    std::memcpy(id.bytes.data(), data.data(), 32);
    return id;
}

Id256 Id256::from_hex(const std::string& hex) { return from_span(p2pir::from_hex(hex)); }

std::string Id256::hex() const { return to_hex(span()); }

void Id256::set_bit(std::size_t i, bool v) {
    const std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (i % 8));
    if (v) bytes[i / 8] |= mask;
    else bytes[i / 8] &= static_cast<std::uint8_t>(~mask);
}

Id256 operator^(const Id256& a, const Id256& b) {
    Id256 out;
    for (std::size_t i = 0; i < 32; ++i) out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

int cpl(const Id256& a, const Id256& b) {
    for (std::size_t i = 0; i < 32; ++i) {
        std::uint8_t x = a.bytes[i] ^ b.bytes[i];
        if (x) return static_cast<int>(8 * i) + std::countl_zero(x);
    }
    return 256;
}

}  // namespace p2pir
