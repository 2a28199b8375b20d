#include "p2pir/provider/provider_store.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/robust.hpp"

namespace p2pir::provider {

void ProviderStore::add(const Cid& c, const PeerId& provider, std::uint64_t now, std::uint64_t lifetime) {
    auto& e = ads_[{c, provider}];
    e = std::max(e, now + lifetime);
}

bool ProviderStore::remove(const Cid& c, const PeerId& provider) { return ads_.erase({c, provider}) > 0; }

std::vector<Cid> ProviderStore::expire(std::uint64_t now) {
    std::vector<Cid> touched;
    for (auto it = ads_.begin(); it != ads_.end();) {
        if (it->second <= now) {
            if (touched.empty() || touched.back() != it->first.first) touched.push_back(it->first.first);
            it = ads_.erase(it);
        } else {
            ++it;
        }
    }
    return touched;
}

std::vector<PeerId> ProviderStore::providers(const Cid& c, std::uint64_t now) const {
    std::vector<PeerId> out;
    for (auto it = ads_.lower_bound({c, PeerId{}}); it != ads_.end() && it->first.first == c; ++it)
        if (it->second > now) out.push_back(it->first.second);
    return out;
}

std::vector<Cid> ProviderStore::cids(std::uint64_t now) const {
    std::vector<Cid> out;
    for (const auto& [key, expiry] : ads_)
        if (expiry > now && (out.empty() || out.back() != key.first)) out.push_back(key.first);
    return out;
}

std::optional<std::uint64_t> ProviderStore::expiry(const Cid& c, const PeerId& provider) const {
    auto it = ads_.find({c, provider});
    if (it == ads_.end()) return std::nullopt;
    return it->second;
}

Bytes encode_address_list(std::vector<Bytes> addrs) {
    std::sort(addrs.begin(), addrs.end());
    addrs.erase(std::unique(addrs.begin(), addrs.end()), addrs.end());
    ByteWriter w;
    for (const auto& a : addrs) {
        if (a.empty() || a.size() > 255) throw InvalidArgument("address length out of range");
        w.u8(static_cast<std::uint8_t>(a.size()));
        w.raw(a);
    }
    return w.take();
}

std::vector<Bytes> decode_address_list(ByteSpan data) {
    std::vector<Bytes> out;
    ByteReader r(data);
    while (!r.done()) {
        std::size_t len = r.u8();
        if (len == 0) throw WireFormatError("empty address in list");
        ByteSpan a = r.raw(len);
        out.emplace_back(a.begin(), a.end());
    }
    return out;
}

std::optional<Bytes> provider_record(const ProviderStore& store, const routing::AddressBook& book,
                                     const Cid& c, std::uint64_t now) {
    std::vector<Bytes> addrs;
    for (const PeerId& p : store.providers(c, now))
        if (const Bytes* a = book.find(p)) addrs.push_back(*a);
    if (addrs.empty()) return std::nullopt;
    return encode_address_list(std::move(addrs));
}

BinnedTable build_binned(const ProviderStore& store, const routing::AddressBook& book, std::uint64_t now) {
    BinnedTable table(crypto::kLabelProviderAds);
    for (const Cid& c : store.cids(now))
        if (auto rec = provider_record(store, book, c, now)) table.put(c, *rec);
    return table;
}

void refresh_binned(BinnedTable& table, const ProviderStore& store, const routing::AddressBook& book,
                    const Cid& c, std::uint64_t now) {
    if (auto rec = provider_record(store, book, c, now)) table.put(c, *rec);
    else table.erase(c);
}

std::pair<pir::ClientState, pir::PirQueryBundle> prov_ad_query(const Cid& c, pir::SchemeId scheme, Prg& rng,
                                                               pir::ClientKeys* keys) {
    return pir::query(scheme, bin_index(c), kBins, 0, rng, keys);
}

pir::PirAnswer prov_ad_respond(const BinnedTable& table, const pir::PirQueryBundle& q, unsigned threads,
                               pir::KeyCache* cache) {
    if (q.declared_rows != kBins) throw InvalidArgument("provider queries must declare 4096 bins");
    pir::RespondOptions opts;
    opts.threads = threads;
    opts.key_cache = cache;
    return pir::respond(*table.database(), q, opts);
}

ProvAdResult prov_ad_open(const pir::ClientState& st, const pir::PirAnswer& a, const Cid& c) {
    if (st.index != bin_index(c)) throw InvalidArgument("client state queried a different bin");
    BinOpenResult bin = open_bin(pir::extract(st, a), c, crypto::kLabelProviderAds);
    if (bin.successes > 1) throw StoreCorruption("several records decrypt under one CID key");
    ProvAdResult out;
    out.successes = bin.successes;
    out.records = bin.records;
    if (bin.value) {
        try {
            out.addresses = decode_address_list(*bin.value);
        } catch (const WireFormatError&) {
            throw StoreCorruption("malformed provider record");
        }
    }
    return out;
}

std::optional<std::vector<Bytes>> prov_ad_extract(const pir::ClientState& st, const pir::PirAnswer& a,
                                                  const Cid& c) {
    return prov_ad_open(st, a, c).addresses;
}

}  // namespace p2pir::provider
