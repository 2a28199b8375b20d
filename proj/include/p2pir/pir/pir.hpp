#pragma once

#include <cstddef>
#include <list>
#include <mutex>
#include <memory>
#include <utility>
#include <variant>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/crypto/hash.hpp"
#include "p2pir/paillier/paillier_pir.hpp"
#include "p2pir/pir/types.hpp"
#include "p2pir/rlwe/rlwe_pir.hpp"

namespace p2pir::pir {

// Long-lived client key material, created on first use per scheme and
// reused across queries. Generating RLWE keys costs ~0.1 s, Paillier keys
// seconds, so callers issuing many queries should keep one of these.
class ClientKeys {
public:
    explicit ClientKeys(Seed seed);
    ClientKeys();

    std::shared_ptr<const paillier::KeyPair> paillier();
    // Keys for RLWE schemes, serving tables of up to 2^levels rows per ciphertext.
    std::shared_ptr<const rlwe::RlweClientKeys> rlwe(SchemeId scheme, unsigned levels);

private:
    Prg rng_;
    std::shared_ptr<const paillier::KeyPair> paillier_;
    std::shared_ptr<const rlwe::RlweClientKeys> rlwe_[3][rlwe::kLogDegree + 1];
};

rlwe::KeyVariant rlwe_variant(SchemeId scheme);

// Server-side cache of prepared RLWE expansion keys, keyed by the digest of
// the client's key material. Least recently used entries are evicted.
class KeyCache {
public:
    explicit KeyCache(std::size_t capacity = 64);

    std::shared_ptr<const rlwe::ExpansionKeys> get(SchemeId scheme, ByteSpan key_material);
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    struct Entry {
        crypto::Digest digest;
        std::shared_ptr<const rlwe::ExpansionKeys> keys;
    };
    std::size_t capacity_;
    std::list<Entry> entries_;
    std::mutex mu_;
    std::size_t hits_ = 0, misses_ = 0;
};

struct ClientState {
    SchemeId scheme = SchemeId::Trivial;
    std::size_t index = 0;
    std::size_t rows = 0;
    std::variant<std::monostate, paillier::PaillierClientSecret, rlwe::RlweClientSecret> secret;
};

std::pair<ClientState, PirQueryBundle> query(SchemeId scheme, std::size_t index, std::size_t rows,
                                             std::size_t row_width, Prg& rng, ClientKeys* keys = nullptr);

// db is zero-padded to the declared row count; a db wider than
// q.row_width (when nonzero) is rejected, a narrower one is widened.
PirAnswer respond(const PirDatabase& db, const PirQueryBundle& q, const RespondOptions& opts = {});

// Padded row for the queried index, and the record inside it.
Bytes extract_row(const ClientState& st, const PirAnswer& a);
Bytes extract(const ClientState& st, const PirAnswer& a);

// Serialized sizes predicted from the wire formats, without running the
// protocol. Paillier figures assume a 3072-bit modulus.
struct WireSizes {
    std::size_t key_bytes = 0;       // key material inside the query bundle
    std::size_t query_bytes = 0;     // whole serialized query bundle
    std::size_t response_bytes = 0;  // whole serialized answer
    std::size_t cells = 0;           // ciphertexts per answer
    std::size_t query_unit = 0;      // bytes per query element (row or ciphertext)
    std::size_t response_unit = 0;   // bytes per answer cell
};

WireSizes expected_sizes(SchemeId scheme, std::size_t rows, std::size_t row_width);

}  // namespace p2pir::pir
