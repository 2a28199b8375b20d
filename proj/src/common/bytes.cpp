#include "p2pir/common/bytes.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"

namespace p2pir {

void store_u32be(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t load_u32be(const std::uint8_t* in) {
    return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) |
           (std::uint32_t{in[2]} << 8) | std::uint32_t{in[3]};
}

void ByteWriter::u32be(std::uint32_t v) {
    std::uint8_t b[4];
    store_u32be(b, v);
    buf_.insert(buf_.end(), b, b + 4);
}

void ByteWriter::u64be(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::u64le(std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::segment(ByteSpan data) {
    if (data.size() > 0xffffffffu) throw InvalidArgument("segment too large");
    u32be(static_cast<std::uint32_t>(data.size()));
    raw(data);
}

ByteSpan ByteReader::raw(std::size_t n) {
    if (n > remaining()) throw WireFormatError("truncated input");
    ByteSpan out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32be() { return load_u32be(raw(4).data()); }

std::uint64_t ByteReader::u64be() {
    auto b = raw(8);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t ByteReader::u64le() {
    auto b = raw(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

ByteSpan ByteReader::segment() {
    std::uint32_t len = u32be();
    return raw(len);
}

void ByteReader::expect_done() const {
    if (!done()) throw WireFormatError("trailing bytes");
}

std::string to_hex(ByteSpan data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidArgument("bad hex digit");
    };
    if (hex.size() % 2) throw InvalidArgument("odd hex length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

bool contains_subsequence(ByteSpan haystack, ByteSpan needle) {
    if (needle.empty()) return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

}  // namespace p2pir
