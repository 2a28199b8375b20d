#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "p2pir/pir/pir.hpp"
#include "p2pir/provider/binned_table.hpp"
#include "p2pir/routing/routing_table.hpp"

namespace p2pir::provider {

inline constexpr std::uint64_t kDefaultAdLifetime = 24 * 3600;

// Provider advertisements keyed by (CID, provider) with expiry times in
// seconds since the epoch. An ad is live while now < expiry.
class ProviderStore {
public:
    void add(const Cid& c, const PeerId& provider, std::uint64_t now, std::uint64_t lifetime = kDefaultAdLifetime);
    bool remove(const Cid& c, const PeerId& provider);
    // Drops expired ads; returns the CIDs that lost an ad.
    std::vector<Cid> expire(std::uint64_t now);

    std::vector<PeerId> providers(const Cid& c, std::uint64_t now) const;
    std::vector<Cid> cids(std::uint64_t now) const;
    std::optional<std::uint64_t> expiry(const Cid& c, const PeerId& provider) const;
    std::size_t size() const { return ads_.size(); }

private:
    std::map<std::pair<Cid, PeerId>, std::uint64_t> ads_;
};

// Sorted, de-duplicated list of addresses: each as 1-byte length || bytes.
Bytes encode_address_list(std::vector<Bytes> addrs);
std::vector<Bytes> decode_address_list(ByteSpan data);

// Joined address list for one CID, or nullopt if no live provider has an address.
std::optional<Bytes> provider_record(const ProviderStore& store, const routing::AddressBook& book,
                                     const Cid& c, std::uint64_t now);

BinnedTable build_binned(const ProviderStore& store, const routing::AddressBook& book, std::uint64_t now);
// Re-encodes the record of one CID after its ads or addresses changed.
void refresh_binned(BinnedTable& table, const ProviderStore& store, const routing::AddressBook& book,
                    const Cid& c, std::uint64_t now);

std::pair<pir::ClientState, pir::PirQueryBundle> prov_ad_query(const Cid& c, pir::SchemeId scheme, Prg& rng,
                                                               pir::ClientKeys* keys = nullptr);
pir::PirAnswer prov_ad_respond(const BinnedTable& table, const pir::PirQueryBundle& q, unsigned threads = 1,
                               pir::KeyCache* cache = nullptr);

struct ProvAdResult {
    std::optional<std::vector<Bytes>> addresses;
    std::size_t successes = 0;
    std::size_t records = 0;
};

// Throws StoreCorruption when more than one record decrypts.
ProvAdResult prov_ad_open(const pir::ClientState& st, const pir::PirAnswer& a, const Cid& c);
std::optional<std::vector<Bytes>> prov_ad_extract(const pir::ClientState& st, const pir::PirAnswer& a, const Cid& c);

}  // namespace p2pir::provider
