#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "p2pir/common/bytes.hpp"

namespace p2pir::pir {

enum class SchemeId : std::uint8_t {
    Paillier = 1,
    RlweLogN = 2,
    Rlwe3 = 3,
    Rlwe2 = 4,
    Trivial = 5,
    TrivialS = 6,
};

const char* scheme_name(SchemeId s);
std::optional<SchemeId> parse_scheme(std::string_view name);
bool is_rlwe(SchemeId s);
std::vector<SchemeId> all_schemes();

// Bytes of framing ahead of each record inside a row.
inline constexpr std::size_t kRecordHeader = 4;

// Fixed-width table of records. Each row holds a 4-byte big-endian record
// length, the record, and zero padding up to row_width.
class PirDatabase {
public:
    PirDatabase() = default;
    // row_width 0 picks the smallest width that fits every record.
    explicit PirDatabase(const std::vector<Bytes>& records, std::size_t row_width = 0);

    std::size_t rows() const { return rows_; }
    std::size_t row_width() const { return row_width_; }
    ByteSpan row(std::size_t j) const;
    Bytes record(std::size_t j) const;

    // Replaces one record in place; it must fit the current width.
    void set_record(std::size_t j, ByteSpan record);

    Bytes serialize() const;
    static PirDatabase deserialize(ByteSpan data);

private:
    std::size_t rows_ = 0;
    std::size_t row_width_ = 0;
    Bytes data_;
};

// Strips the in-row framing; throws DecryptionFailure on a malformed row.
Bytes unframe_record(ByteSpan row);
std::size_t framed_size(std::size_t record_len);

struct PirQueryBundle {
    SchemeId scheme = SchemeId::Trivial;
    std::uint32_t declared_rows = 0;
    std::uint32_t row_width = 0;  // 0 leaves the width to the server
    Bytes key_material;
    Bytes query_body;

    Bytes serialize() const;
    static PirQueryBundle deserialize(ByteSpan data);
    std::size_t wire_size() const;
};

struct PirAnswer {
    SchemeId scheme = SchemeId::Trivial;
    std::uint32_t rows = 0;
    std::uint32_t row_width = 0;
    Bytes payload;

    Bytes serialize() const;
    static PirAnswer deserialize(ByteSpan data);
    std::size_t wire_size() const;
};

class KeyCache;

struct RespondOptions {
    // Fold indicator positions at or past the last row onto the last row,
    // so any index beyond the table retrieves its final row.
    bool fold_tail = false;
    unsigned threads = 1;
    // Prepared server-side key material reused across queries.
    KeyCache* key_cache = nullptr;
};

}  // namespace p2pir::pir
