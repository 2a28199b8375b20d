#include "p2pir/pir/pir.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"

namespace p2pir::pir {

namespace {

std::size_t variant_slot(rlwe::KeyVariant v) { return static_cast<std::size_t>(v) - 1; }

PirDatabase widen(const PirDatabase& db, std::size_t width) {
    std::vector<Bytes> records(db.rows());
    for (std::size_t j = 0; j < db.rows(); ++j) records[j] = db.record(j);
    return PirDatabase(records, width);
}

Bytes trivial_payload(const PirDatabase& db, bool fold_tail) {
    ByteWriter w;
    w.u8(fold_tail ? 1 : 0);
    w.raw(db.serialize());
    return w.take();
}

Bytes trivial_row(const ClientState& st, const PirAnswer& a) {
    ByteReader r(a.payload);
    const bool fold = r.u8() != 0;
    PirDatabase db = PirDatabase::deserialize(r.raw(r.remaining()));
    if (db.row_width() != a.row_width) throw WireFormatError("answer width mismatch");
    if (st.index < db.rows()) {
        ByteSpan row = db.row(st.index);
        return Bytes(row.begin(), row.end());
    }
    if (fold) {
        ByteSpan row = db.row(db.rows() - 1);
        return Bytes(row.begin(), row.end());
    }
    return Bytes(db.row_width(), 0);
}

}  // namespace

rlwe::KeyVariant rlwe_variant(SchemeId scheme) {
    switch (scheme) {
        case SchemeId::RlweLogN: return rlwe::KeyVariant::LogN;
        case SchemeId::Rlwe3: return rlwe::KeyVariant::Three;
        case SchemeId::Rlwe2: return rlwe::KeyVariant::Two;
        default: throw InvalidArgument("not an RLWE scheme");
    }
}

KeyCache::KeyCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

std::shared_ptr<const rlwe::ExpansionKeys> KeyCache::get(SchemeId scheme, ByteSpan key_material) {
    const rlwe::KeyVariant v = rlwe_variant(scheme);
    Bytes tagged(key_material.begin(), key_material.end());
    tagged.push_back(static_cast<std::uint8_t>(scheme));
    const crypto::Digest d = crypto::sha256(tagged);
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (it->digest == d) {
                entries_.splice(entries_.begin(), entries_, it);
                ++hits_;
                return entries_.front().keys;
            }
        }
        ++misses_;
    }
    rlwe::RlweKeyMaterial km = rlwe::deserialize_key_material(key_material);
    if (km.variant != v) throw SchemeMismatch("key material variant does not match the scheme");
    auto keys = std::make_shared<const rlwe::ExpansionKeys>(km);
    std::lock_guard<std::mutex> lock(mu_);
    entries_.push_front({d, keys});
    if (entries_.size() > capacity_) entries_.pop_back();
    return keys;
}

ClientKeys::ClientKeys(Seed seed) : rng_(seed) {}
ClientKeys::ClientKeys() : rng_(random_seed()) {}

std::shared_ptr<const paillier::KeyPair> ClientKeys::paillier() {
    if (!paillier_) paillier_ = std::make_shared<const paillier::KeyPair>(paillier::keygen(rng_));
    return paillier_;
}

std::shared_ptr<const rlwe::RlweClientKeys> ClientKeys::rlwe(SchemeId scheme, unsigned levels) {
    if (levels > rlwe::kLogDegree) throw InvalidArgument("too many expansion levels");
    const rlwe::KeyVariant v = rlwe_variant(scheme);
    auto& slot = rlwe_[variant_slot(v)][levels];
    if (!slot) slot = std::make_shared<const rlwe::RlweClientKeys>(rlwe::make_client_keys(v, levels, rng_));
    return slot;
}

std::pair<ClientState, PirQueryBundle> query(SchemeId scheme, std::size_t index, std::size_t rows,
                                             std::size_t row_width, Prg& rng, ClientKeys* keys) {
    if (rows == 0) throw InvalidArgument("row count must be positive");
    if (index >= rows) throw InvalidArgument("index out of range");
    if (rows > 0xffffffffu || row_width > 0xffffffffu) throw InvalidArgument("table too large");
    ClientState st;
    st.scheme = scheme;
    st.index = index;
    st.rows = rows;
    PirQueryBundle b;
    b.scheme = scheme;
    b.declared_rows = static_cast<std::uint32_t>(rows);
    b.row_width = static_cast<std::uint32_t>(row_width);
    switch (scheme) {
        case SchemeId::Trivial:
        case SchemeId::TrivialS:
            break;
        case SchemeId::Paillier: {
            std::shared_ptr<const paillier::KeyPair> kp;
            if (keys) kp = keys->paillier();
            else kp = std::make_shared<const paillier::KeyPair>(paillier::keygen(rng));
            auto q = paillier::paillier_query(std::move(kp), index, rows, rng);
            st.secret = std::move(q.secret);
            b.key_material = std::move(q.key_material);
            b.query_body = std::move(q.body);
            break;
        }
        case SchemeId::RlweLogN:
        case SchemeId::Rlwe3:
        case SchemeId::Rlwe2: {
            rlwe::RlweQuery q;
            if (keys) q = rlwe::rlwe_query(*keys->rlwe(scheme, rlwe::expansion_levels(rows)), index, rows, rng);
            else q = rlwe::rlwe_query(rlwe_variant(scheme), index, rows, rng);
            st.secret = std::move(q.secret);
            b.key_material = std::move(q.key_material);
            b.query_body = std::move(q.body);
            break;
        }
    }
    return {std::move(st), std::move(b)};
}

PirAnswer respond(const PirDatabase& db, const PirQueryBundle& q, const RespondOptions& opts) {
    if (q.declared_rows == 0) throw WireFormatError("declared row count is zero");
    if (db.rows() > q.declared_rows) throw InvalidArgument("database larger than the declared row count");
    if (q.row_width != 0 && q.row_width < db.row_width())
        throw InvalidArgument("database rows wider than the declared row width");
    PirDatabase widened;
    const PirDatabase* table = &db;
    if (q.row_width > db.row_width()) {
        widened = widen(db, q.row_width);
        table = &widened;
    }
    PirAnswer a;
    a.scheme = q.scheme;
    a.rows = q.declared_rows;
    a.row_width = static_cast<std::uint32_t>(table->row_width());
    switch (q.scheme) {
        case SchemeId::Trivial:
        case SchemeId::TrivialS:
            if (!q.query_body.empty() || !q.key_material.empty())
                throw WireFormatError("trivial query carries a body");
            a.rows = static_cast<std::uint32_t>(table->rows());
            a.payload = trivial_payload(*table, opts.fold_tail);
            break;
        case SchemeId::Paillier:
            a.payload = paillier::paillier_respond(q.key_material, q.query_body, *table, q.declared_rows, opts);
            break;
        case SchemeId::RlweLogN:
        case SchemeId::Rlwe3:
        case SchemeId::Rlwe2:
            if (opts.key_cache)
                a.payload = rlwe::rlwe_respond(*opts.key_cache->get(q.scheme, q.key_material), q.query_body,
                                               *table, q.declared_rows, opts);
            else
                a.payload = rlwe::rlwe_respond(rlwe_variant(q.scheme), q.key_material, q.query_body, *table,
                                               q.declared_rows, opts);
            break;
    }
    return a;
}

Bytes extract_row(const ClientState& st, const PirAnswer& a) {
    if (st.scheme != a.scheme) throw SchemeMismatch("answer scheme differs from the query scheme");
    switch (st.scheme) {
        case SchemeId::Trivial:
        case SchemeId::TrivialS:
            return trivial_row(st, a);
        case SchemeId::Paillier: {
            const auto* s = std::get_if<paillier::PaillierClientSecret>(&st.secret);
            if (!s) throw SchemeMismatch("client state holds no Paillier secret");
            return paillier::paillier_extract_row(*s, a.payload, a.row_width);
        }
        case SchemeId::RlweLogN:
        case SchemeId::Rlwe3:
        case SchemeId::Rlwe2: {
            const auto* s = std::get_if<rlwe::RlweClientSecret>(&st.secret);
            if (!s) throw SchemeMismatch("client state holds no RLWE secret");
            return rlwe::rlwe_extract_row(*s, a.payload, a.row_width);
        }
    }
    throw SchemeMismatch("unknown scheme");
}

Bytes extract(const ClientState& st, const PirAnswer& a) { return unframe_record(extract_row(st, a)); }

WireSizes expected_sizes(SchemeId scheme, std::size_t rows, std::size_t row_width) {
    constexpr std::size_t kHeader = 1 + 4 + 4 + 4 + 4;  // scheme, rows, width, two segment lengths
    WireSizes w;
    switch (scheme) {
        case SchemeId::Trivial:
        case SchemeId::TrivialS:
            w.query_bytes = kHeader;
            w.response_bytes = kHeader + 1 + 8 + rows * row_width;
            w.cells = rows;
            w.response_unit = row_width;
            break;
        case SchemeId::Paillier: {
            const std::size_t nb = paillier::kModulusBytes;
            const std::size_t cb = nb - 1;
            w.cells = std::max<std::size_t>(1, (row_width + cb - 1) / cb);
            w.key_bytes = 4 + nb + 4 + 2 * nb;
            w.query_bytes = kHeader + w.key_bytes + 32 + rows * nb;
            w.response_bytes = kHeader + 4 + w.cells * 2 * nb;
            w.query_unit = nb;
            w.response_unit = 2 * nb;
            break;
        }
        case SchemeId::RlweLogN:
        case SchemeId::Rlwe3:
        case SchemeId::Rlwe2: {
            const rlwe::KeyVariant v = rlwe_variant(scheme);
            const unsigned levels = rlwe::expansion_levels(rows);
            const std::size_t keys = rlwe::generator_exponents(v, levels).size();
            w.cells = rlwe::cells_for_width(row_width, rlwe::packing_bits(v, levels));
            w.key_bytes = 1 + 1 + 4 + keys * (4 + 32 + rlwe::kMaxLimbs * rlwe::kPolyBytes);
            w.query_bytes = kHeader + w.key_bytes + 4 +
                            rlwe::query_ciphertexts(rows) * (2 + 32 + rlwe::kMaxLimbs * rlwe::kPolyBytes);
            w.response_bytes = kHeader + 1 + 4 + w.cells * (2 + 2 * rlwe::kPolyBytes);
            w.query_unit = 2 + 32 + rlwe::kMaxLimbs * rlwe::kPolyBytes;
            w.response_unit = 2 + 2 * rlwe::kPolyBytes;
            break;
        }
    }
    return w;
}

}  // namespace p2pir::pir
