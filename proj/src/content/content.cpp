#include "p2pir/content/content.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/robust.hpp"

namespace p2pir::content {

std::size_t block_row_width() { return pir::framed_size(kBlockBytes + crypto::RobustCipher::kOverhead); }

Cid cid_of(ByteSpan block) { return Cid::hash_of(block); }

Cid BlockStore::add(ByteSpan block) {
    if (block.size() > kBlockBytes) throw InvalidArgument("block larger than 256 KB");
    const Cid c = cid_of(block);
    auto it = std::lower_bound(cids_.begin(), cids_.end(), c);
    if (it != cids_.end() && *it == c) return c;
    const auto pos = it - cids_.begin();
    cids_.insert(it, c);
    blocks_.insert(blocks_.begin() + pos, Bytes(block.begin(), block.end()));
    wanthave_.reset();
    encrypted_.reset();
    return c;
}

bool BlockStore::remove(const Cid& c) {
    auto it = std::lower_bound(cids_.begin(), cids_.end(), c);
    if (it == cids_.end() || *it != c) return false;
    blocks_.erase(blocks_.begin() + (it - cids_.begin()));
    cids_.erase(it);
    wanthave_.reset();
    encrypted_.reset();
    return true;
}

std::optional<std::size_t> BlockStore::index_of(const Cid& c) const {
    auto it = std::lower_bound(cids_.begin(), cids_.end(), c);
    if (it == cids_.end() || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - cids_.begin());
}

const provider::BinnedTable& BlockStore::wanthave_table() const {
    if (!wanthave_) {
        auto t = std::make_shared<provider::BinnedTable>(crypto::kLabelWantHave);
        for (std::size_t i = 0; i < cids_.size(); ++i) {
            std::uint8_t idx[4];
            store_u32be(idx, static_cast<std::uint32_t>(i));
            t->put(cids_[i], ByteSpan(idx, 4));
        }
        wanthave_ = std::move(t);
    }
    return *wanthave_;
}

std::shared_ptr<const pir::PirDatabase> BlockStore::block_table() const {
    if (!encrypted_) {
        std::vector<Bytes> rows(std::max<std::size_t>(cids_.size(), 1));
        for (std::size_t i = 0; i < cids_.size(); ++i)
            rows[i] = crypto::RobustCipher(crypto::kdf(cids_[i], crypto::kLabelContentBlock)).encrypt(blocks_[i]);
        encrypted_ = std::make_shared<const pir::PirDatabase>(rows, block_row_width());
    }
    return encrypted_;
}

pir::SchemeId recommend_scheme(std::size_t blocks) {
    return blocks < kTrivialBlockThreshold ? pir::SchemeId::Trivial : pir::SchemeId::RlweLogN;
}

std::vector<crypto::Digest> wanthave_trivial(const BlockStore& store) {
    std::vector<crypto::Digest> out;
    out.reserve(store.size());
    for (const Cid& c : store.cids()) out.push_back(crypto::sha256(c.span()));
    return out;
}

std::optional<std::size_t> wanthave_trivial_locate(const std::vector<crypto::Digest>& hashed, const Cid& c) {
    const crypto::Digest h = crypto::sha256(c.span());
    for (std::size_t i = 0; i < hashed.size(); ++i)
        if (hashed[i] == h) return i;
    return std::nullopt;
}

Bytes WantHaveResponse::serialize() const {
    ByteWriter w;
    w.raw(answer.serialize());
    w.u8(static_cast<std::uint8_t>(recommended));
    w.u32be(blocks);
    return w.take();
}

WantHaveResponse WantHaveResponse::deserialize(ByteSpan data) {
    if (data.size() < 5) throw WireFormatError("truncated wanthave response");
    WantHaveResponse r;
    r.answer = pir::PirAnswer::deserialize(data.first(data.size() - 5));
    ByteReader tail(data.last(5));
    const std::uint8_t s = tail.u8();
    if (s < 1 || s > 6) throw WireFormatError("unknown recommended scheme");
    r.recommended = static_cast<pir::SchemeId>(s);
    r.blocks = tail.u32be();
    return r;
}

std::pair<pir::ClientState, pir::PirQueryBundle> wanthave_query(const Cid& c, pir::SchemeId scheme, Prg& rng,
                                                                pir::ClientKeys* keys) {
    return pir::query(scheme, provider::bin_index(c), provider::kBins, 0, rng, keys);
}

WantHaveResponse wanthave_respond(const BlockStore& store, const pir::PirQueryBundle& q, unsigned threads,
                                  pir::KeyCache* cache) {
    if (q.declared_rows != provider::kBins) throw InvalidArgument("wanthave queries must declare 4096 bins");
    pir::RespondOptions opts;
    opts.threads = threads;
    opts.key_cache = cache;
    WantHaveResponse r;
    r.answer = pir::respond(*store.wanthave_table().database(), q, opts);
    r.recommended = recommend_scheme(store.size());
    r.blocks = static_cast<std::uint32_t>(store.size());
    return r;
}

WantHaveResult wanthave_extract(const pir::ClientState& st, const WantHaveResponse& r, const Cid& c) {
    if (st.index != provider::bin_index(c)) throw InvalidArgument("client state queried a different bin");
    provider::BinOpenResult bin = provider::open_bin(pir::extract(st, r.answer), c, crypto::kLabelWantHave);
    if (bin.successes > 1) throw StoreCorruption("several records decrypt under one CID key");
    WantHaveResult out;
    out.recommended_scheme = r.recommended;
    out.blocks = r.blocks;
    if (bin.value) {
        if (bin.value->size() != 4) throw StoreCorruption("malformed wanthave record");
        out.found = true;
        out.index = load_u32be(bin.value->data());
        if (out.index >= r.blocks) throw StoreCorruption("wanthave index past the block count");
    }
    return out;
}

std::pair<pir::ClientState, pir::PirQueryBundle> private_block_query(std::size_t index, std::size_t blocks,
                                                                     pir::SchemeId scheme, Prg& rng,
                                                                     pir::ClientKeys* keys) {
    return pir::query(scheme, index, blocks, block_row_width(), rng, keys);
}

pir::PirAnswer private_block_respond(const BlockStore& store, const pir::PirQueryBundle& q, unsigned threads,
                                     pir::KeyCache* cache) {
    pir::RespondOptions opts;
    opts.threads = threads;
    opts.key_cache = cache;
    return pir::respond(*store.block_table(), q, opts);
}

Bytes private_block_extract(const pir::ClientState& st, const pir::PirAnswer& a, const Cid& c) {
    const Bytes ct = pir::extract(st, a);
    auto pt = crypto::RobustCipher(crypto::kdf(c, crypto::kLabelContentBlock)).decrypt(ct);
    if (!pt) throw DecryptionFailure("block does not decrypt under the CID key");
    return std::move(*pt);
}

}  // namespace p2pir::content
