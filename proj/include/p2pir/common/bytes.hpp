#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace p2pir {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Append-only big-endian writer.
class ByteWriter {
public:
    ByteWriter() = default;
    explicit ByteWriter(std::size_t reserve) { buf_.reserve(reserve); }

    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32be(std::uint32_t v);
    void u64be(std::uint64_t v);
    void u64le(std::uint64_t v);
    void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    // 4-byte big-endian length followed by the bytes.
    void segment(ByteSpan data);

    std::size_t size() const { return buf_.size(); }
    Bytes& bytes() { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

// Bounds-checked reader; every short read throws WireFormatError.
class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32be();
    std::uint64_t u64be();
    std::uint64_t u64le();
    ByteSpan raw(std::size_t n);
    ByteSpan segment();

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    ByteSpan data_;
    std::size_t pos_ = 0;
};

void store_u32be(std::uint8_t* out, std::uint32_t v);
std::uint32_t load_u32be(const std::uint8_t* in);

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);

inline ByteSpan as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// True if `needle` occurs anywhere in `haystack`.
bool contains_subsequence(ByteSpan haystack, ByteSpan needle);

}  // namespace p2pir
