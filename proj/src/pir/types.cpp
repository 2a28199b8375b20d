#include "p2pir/pir/types.hpp"

#include <algorithm>
#include <cstring>

#include "p2pir/common/errors.hpp"

namespace p2pir::pir {

const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::Paillier: return "paillier";
        case SchemeId::RlweLogN: return "rlwe-logn";
        case SchemeId::Rlwe3: return "rlwe3";
        case SchemeId::Rlwe2: return "rlwe2";
        case SchemeId::Trivial: return "trivial";
        case SchemeId::TrivialS: return "trivial-s";
    }
    return "unknown";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (SchemeId s : all_schemes())
        if (name == scheme_name(s)) return s;
    return std::nullopt;
}

bool is_rlwe(SchemeId s) {
    return s == SchemeId::RlweLogN || s == SchemeId::Rlwe3 || s == SchemeId::Rlwe2;
}

std::vector<SchemeId> all_schemes() {
    return {SchemeId::Paillier, SchemeId::RlweLogN, SchemeId::Rlwe3,
            SchemeId::Rlwe2,    SchemeId::Trivial,  SchemeId::TrivialS};
}

namespace {

SchemeId read_scheme(ByteReader& r) {
    std::uint8_t v = r.u8();
    if (v < 1 || v > 6) throw WireFormatError("unknown scheme id");
    return static_cast<SchemeId>(v);
}

}  // namespace

std::size_t framed_size(std::size_t record_len) { return kRecordHeader + record_len; }

PirDatabase::PirDatabase(const std::vector<Bytes>& records, std::size_t row_width) {
    if (records.empty()) throw InvalidArgument("database needs at least one row");
    std::size_t need = 0;
    for (const auto& r : records) need = std::max(need, framed_size(r.size()));
    if (row_width == 0) row_width = need;
    if (row_width < need) throw InvalidArgument("record does not fit the row width");
    rows_ = records.size();
    row_width_ = row_width;
    data_.assign(rows_ * row_width_, 0);
    for (std::size_t j = 0; j < rows_; ++j) set_record(j, records[j]);
}

ByteSpan PirDatabase::row(std::size_t j) const {
    if (j >= rows_) throw InvalidArgument("row index out of range");
    return ByteSpan(data_).subspan(j * row_width_, row_width_);
}

Bytes PirDatabase::record(std::size_t j) const { return unframe_record(row(j)); }

void PirDatabase::set_record(std::size_t j, ByteSpan record) {
    if (j >= rows_) throw InvalidArgument("row index out of range");
    if (framed_size(record.size()) > row_width_) throw InvalidArgument("record does not fit the row width");
    std::uint8_t* dst = data_.data() + j * row_width_;
    std::memset(dst, 0, row_width_);
    store_u32be(dst, static_cast<std::uint32_t>(record.size()));
    if (!record.empty()) std::memcpy(dst + kRecordHeader, record.data(), record.size());
}

Bytes PirDatabase::serialize() const {
    ByteWriter w(8 + data_.size());
    w.u32be(static_cast<std::uint32_t>(rows_));
    w.u32be(static_cast<std::uint32_t>(row_width_));
    w.raw(data_);
    return w.take();
}

PirDatabase PirDatabase::deserialize(ByteSpan data) {
    ByteReader r(data);
    PirDatabase db;
    db.rows_ = r.u32be();
    db.row_width_ = r.u32be();
    if (db.row_width_ < kRecordHeader) throw WireFormatError("row width too small");
    if (db.rows_ > r.remaining() / db.row_width_ + 1) throw WireFormatError("row count exceeds payload");
    auto body = r.raw(db.rows_ * db.row_width_);
    db.data_.assign(body.begin(), body.end());
    r.expect_done();
    return db;
}

Bytes unframe_record(ByteSpan row) {
    if (row.size() < kRecordHeader) throw DecryptionFailure("row shorter than its framing");
    std::uint32_t len = load_u32be(row.data());
    if (len > row.size() - kRecordHeader) throw DecryptionFailure("record length exceeds row");
    return Bytes(row.begin() + kRecordHeader, row.begin() + kRecordHeader + len);
}

Bytes PirQueryBundle::serialize() const {
    ByteWriter w(wire_size());
    w.u8(static_cast<std::uint8_t>(scheme));
    w.u32be(declared_rows);
    w.u32be(row_width);
    w.segment(key_material);
    w.segment(query_body);
    return w.take();
}

PirQueryBundle PirQueryBundle::deserialize(ByteSpan data) {
    ByteReader r(data);
    PirQueryBundle b;
    b.scheme = read_scheme(r);
    b.declared_rows = r.u32be();
    b.row_width = r.u32be();
    auto km = r.segment();
    b.key_material.assign(km.begin(), km.end());
    auto body = r.segment();
    b.query_body.assign(body.begin(), body.end());
    r.expect_done();
    return b;
}

std::size_t PirQueryBundle::wire_size() const { return 1 + 4 + 4 + 4 + key_material.size() + 4 + query_body.size(); }

Bytes PirAnswer::serialize() const {
    ByteWriter w(wire_size());
    w.u8(static_cast<std::uint8_t>(scheme));
    w.u32be(rows);
    w.u32be(row_width);
    w.segment({});
    w.segment(payload);
    return w.take();
}

PirAnswer PirAnswer::deserialize(ByteSpan data) {
    ByteReader r(data);
    PirAnswer a;
    a.scheme = read_scheme(r);
    a.rows = r.u32be();
    a.row_width = r.u32be();
    if (!r.segment().empty()) throw WireFormatError("answer carries key material");
    auto body = r.segment();
    a.payload.assign(body.begin(), body.end());
    r.expect_done();
    return a;
}

std::size_t PirAnswer::wire_size() const { return 1 + 4 + 4 + 4 + 4 + payload.size(); }

}  // namespace p2pir::pir
