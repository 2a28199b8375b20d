#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "p2pir/crypto/hash.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/provider/binned_table.hpp"

namespace p2pir::content {

inline constexpr std::size_t kBlockBytes = 256 * 1024;
// Below this many blocks the server recommends trivial retrieval.
inline constexpr std::size_t kTrivialBlockThreshold = 64;

std::size_t block_row_width();
Cid cid_of(ByteSpan block);

// Content blocks ordered by CID; D[i] is the block of L[i].
class BlockStore {
public:
    // Returns the block's CID (SHA-256 of its bytes).
    Cid add(ByteSpan block);
    bool remove(const Cid& c);

    std::size_t size() const { return cids_.size(); }
    const std::vector<Cid>& cids() const { return cids_; }
    const Bytes& block(std::size_t i) const { return blocks_.at(i); }
    std::optional<std::size_t> index_of(const Cid& c) const;

    // Cached tables, rebuilt after content changes.
    const provider::BinnedTable& wanthave_table() const;
    std::shared_ptr<const pir::PirDatabase> block_table() const;

private:
    std::vector<Cid> cids_;
    std::vector<Bytes> blocks_;
    mutable std::shared_ptr<const provider::BinnedTable> wanthave_;
    mutable std::shared_ptr<const pir::PirDatabase> encrypted_;
};

pir::SchemeId recommend_scheme(std::size_t blocks);

// Public-hash variant: the server sends H(L[i]) for every i.
std::vector<crypto::Digest> wanthave_trivial(const BlockStore& store);
std::optional<std::size_t> wanthave_trivial_locate(const std::vector<crypto::Digest>& hashed, const Cid& c);

// PIR answer followed by the recommended scheme for the block step (1 byte)
// and the block count (4 bytes big-endian) the client declares in it.
struct WantHaveResponse {
    pir::PirAnswer answer;
    pir::SchemeId recommended = pir::SchemeId::Trivial;
    std::uint32_t blocks = 0;

    Bytes serialize() const;
    static WantHaveResponse deserialize(ByteSpan data);
};

struct WantHaveResult {
    bool found = false;
    std::size_t index = 0;
    pir::SchemeId recommended_scheme = pir::SchemeId::Trivial;
    std::size_t blocks = 0;
};

std::pair<pir::ClientState, pir::PirQueryBundle> wanthave_query(const Cid& c, pir::SchemeId scheme, Prg& rng,
                                                                pir::ClientKeys* keys = nullptr);
WantHaveResponse wanthave_respond(const BlockStore& store, const pir::PirQueryBundle& q, unsigned threads = 1,
                                  pir::KeyCache* cache = nullptr);
WantHaveResult wanthave_extract(const pir::ClientState& st, const WantHaveResponse& r, const Cid& c);

std::pair<pir::ClientState, pir::PirQueryBundle> private_block_query(std::size_t index, std::size_t blocks,
                                                                     pir::SchemeId scheme, Prg& rng,
                                                                     pir::ClientKeys* keys = nullptr);
pir::PirAnswer private_block_respond(const BlockStore& store, const pir::PirQueryBundle& q, unsigned threads = 1,
                                     pir::KeyCache* cache = nullptr);
// Throws DecryptionFailure unless the row decrypts under the CID's key.
Bytes private_block_extract(const pir::ClientState& st, const pir::PirAnswer& a, const Cid& c);

}  // namespace p2pir::content
