#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/id.hpp"
#include "p2pir/common/prg.hpp"

namespace p2pir::routing {

inline constexpr std::size_t kBucketSize = 20;
inline constexpr std::size_t kMaxBuckets = 256;
inline constexpr std::size_t kAddressBytes = 76;
inline constexpr std::size_t kEntryBytes = 32 + kAddressBytes;

struct RtEntry {
    PeerId id;
    std::uint64_t last_seen = 0;
};

// Kademlia routing table with dynamically split buckets. Bucket i holds
// peers whose CPL with self is i; the last bucket also holds every peer
// with a longer CPL until it overflows and splits.
class RoutingTable {
public:
    explicit RoutingTable(const PeerId& self, std::size_t k = kBucketSize);

    const PeerId& self() const { return self_; }
    std::size_t k() const { return k_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    // Index of the last bucket (r); buckets are 0..r.
    std::size_t last_index() const { return buckets_.size() - 1; }
    std::size_t bucket_count() const { return buckets_.size(); }
    const std::vector<RtEntry>& bucket(std::size_t i) const { return buckets_.at(i); }
    std::size_t bucket_for(const PeerId& p) const;

    // False if the peer is self, already present, or its bucket is full
    // and cannot split.
    bool insert(const PeerId& p, std::uint64_t now = 0);
    bool remove(const PeerId& p);
    bool contains(const PeerId& p) const;
    void touch(const PeerId& p, std::uint64_t now);

    std::vector<PeerId> peers() const;
    // Up to `count` peers closest to target by XOR distance, closest first.
    std::vector<PeerId> nearest(const PeerId& target, std::size_t count) const;
    std::vector<std::vector<PeerId>> bucket_ids() const;

private:
    PeerId self_;
    std::size_t k_;
    std::size_t size_ = 0;
    std::vector<std::vector<RtEntry>> buckets_;
};

// Bucket normalization for a target bucket index t: exactly min(k, total)
// peers, chosen by CPL only. `buckets` are indexed by CPL with self, the
// last one possibly holding longer CPLs as well. Random choices draw from
// `rng`; the output is sorted by id.
std::vector<PeerId> normalize_buckets(const PeerId& self, const std::vector<std::vector<PeerId>>& buckets,
                                      std::size_t t, std::size_t k, Prg& rng);
std::vector<PeerId> normalize(const RoutingTable& rt, std::size_t t, Prg& rng);

// Peer id to multiaddress (at most 76 bytes, not ending in a zero byte).
class AddressBook {
public:
    void set(const PeerId& p, ByteSpan addr);
    void erase(const PeerId& p) { book_.erase(p); }
    const Bytes* find(const PeerId& p) const;
    std::size_t size() const { return book_.size(); }

private:
    std::map<PeerId, Bytes> book_;
};

Bytes make_multiaddr(std::uint32_t ipv4, std::uint16_t port);

struct PeerRecord {
    PeerId id;
    Bytes addr;
    bool operator==(const PeerRecord&) const = default;
};

// Every bucket normalized and joined with addresses. Rows have a fixed
// width of k entries of 32-byte id + 76-byte zero-padded address.
class NormalizedRoutingTable {
public:
    NormalizedRoutingTable() = default;
    NormalizedRoutingTable(const RoutingTable& rt, const AddressBook& book, const Seed& seed);

    std::size_t rows() const { return buckets_.size(); }
    std::size_t k() const { return k_; }
    const std::vector<PeerRecord>& bucket(std::size_t i) const { return buckets_.at(i); }
    // Row for target index t (t past the last row maps to the last row).
    const std::vector<PeerRecord>& lookup(std::size_t t) const;
    std::size_t missing_addresses() const { return missing_; }
    const Seed& seed() const { return seed_; }

    std::size_t row_width() const;
    Bytes serialize_row(std::size_t i) const;

private:
    std::size_t k_ = kBucketSize;
    std::size_t missing_ = 0;
    Seed seed_{};
    std::vector<std::vector<PeerRecord>> buckets_;
};

NormalizedRoutingTable build_normalized(const RoutingTable& rt, const AddressBook& book, const Seed& seed);

std::size_t routing_row_width(std::size_t k = kBucketSize);
Bytes encode_bucket(const std::vector<PeerRecord>& bucket, std::size_t k = kBucketSize);
std::vector<PeerRecord> decode_bucket(ByteSpan record);

}  // namespace p2pir::routing
