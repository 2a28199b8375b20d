#include "p2pir/routing/routing_table.hpp"

#include <algorithm>
#include <cstring>

#include "p2pir/common/errors.hpp"
#include "p2pir/pir/types.hpp"

namespace p2pir::routing {

RoutingTable::RoutingTable(const PeerId& self, std::size_t k) : self_(self), k_(k), buckets_(1) {
    if (k == 0) throw InvalidArgument("bucket size must be positive");
}

std::size_t RoutingTable::bucket_for(const PeerId& p) const {
    return std::min<std::size_t>(static_cast<std::size_t>(cpl(self_, p)), last_index());
}

bool RoutingTable::contains(const PeerId& p) const {
    if (p == self_) return false;
    const auto& b = buckets_[bucket_for(p)];
    return std::any_of(b.begin(), b.end(), [&](const RtEntry& e) { return e.id == p; });
}

bool RoutingTable::insert(const PeerId& p, std::uint64_t now) {
    if (p == self_ || contains(p)) return false;
    for (;;) {
        const std::size_t idx = bucket_for(p);
        auto& b = buckets_[idx];
        if (b.size() < k_) {
            b.push_back({p, now});
            ++size_;
            return true;
        }
        if (idx != last_index() || buckets_.size() >= kMaxBuckets) return false;
        // Split the last bucket: entries with a longer CPL move on.
        std::vector<RtEntry> stay, move;
        for (const auto& e : b) {
            if (static_cast<std::size_t>(cpl(self_, e.id)) > idx) move.push_back(e);
            else stay.push_back(e);
        }
        b = std::move(stay);
        buckets_.push_back(std::move(move));
    }
}

bool RoutingTable::remove(const PeerId& p) {
    if (p == self_) return false;
    auto& b = buckets_[bucket_for(p)];
    auto it = std::find_if(b.begin(), b.end(), [&](const RtEntry& e) { return e.id == p; });
    if (it == b.end()) return false;
    b.erase(it);
    --size_;
    return true;
}

void RoutingTable::touch(const PeerId& p, std::uint64_t now) {
    if (p == self_) return;
    for (auto& e : buckets_[bucket_for(p)])
        if (e.id == p) e.last_seen = now;
}

std::vector<PeerId> RoutingTable::peers() const {
    std::vector<PeerId> out;
    out.reserve(size_);
    for (const auto& b : buckets_)
        for (const auto& e : b) out.push_back(e.id);
    return out;
}

std::vector<PeerId> RoutingTable::nearest(const PeerId& target, std::size_t count) const {
    std::vector<PeerId> all = peers();
    count = std::min(count, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(),
                      [&](const PeerId& a, const PeerId& b) { return closer(target, a, b); });
    all.resize(count);
    return all;
}

std::vector<std::vector<PeerId>> RoutingTable::bucket_ids() const {
    std::vector<std::vector<PeerId>> out(buckets_.size());
    for (std::size_t i = 0; i < buckets_.size(); ++i)
        for (const auto& e : buckets_[i]) out[i].push_back(e.id);
    return out;
}

namespace {

// Moves `count` uniformly chosen members of pool into out.
void pick_random(std::vector<PeerId> pool, std::size_t count, Prg& rng, std::vector<PeerId>& out) {
    std::sort(pool.begin(), pool.end());
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

// True if the first `bits` bits of a and b agree.
bool same_prefix(const Id256& a, const Id256& b, std::size_t bits) {
    std::size_t full = bits / 8;
    if (std::memcmp(a.bytes.data(), b.bytes.data(), full) != 0) return false;
    if (bits % 8 == 0) return true;
    std::uint8_t mask = static_cast<std::uint8_t>(0xff00u >> (bits % 8));
    return ((a.bytes[full] ^ b.bytes[full]) & mask) == 0;
}

}  // namespace

std::vector<PeerId> normalize_buckets(const PeerId& self, const std::vector<std::vector<PeerId>>& buckets,
                                      std::size_t t, std::size_t k, Prg& rng) {
    std::vector<PeerId> result;
    std::size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    if (total <= k) {
        for (const auto& b : buckets) result.insert(result.end(), b.begin(), b.end());
        std::sort(result.begin(), result.end());
        return result;
    }
    const std::size_t r = buckets.size() - 1;
    t = std::min(t, r);
    result = buckets[t];
    if (result.size() < k && t < r) {
        std::vector<PeerId> closer_pool;
        for (std::size_t i = t + 1; i <= r; ++i) closer_pool.insert(closer_pool.end(), buckets[i].begin(), buckets[i].end());
        if (closer_pool.size() <= k - result.size()) result.insert(result.end(), closer_pool.begin(), closer_pool.end());
        else pick_random(std::move(closer_pool), k - result.size(), rng, result);
    }
    if (result.size() < k) {
        std::ptrdiff_t l = static_cast<std::ptrdiff_t>(t) - 1;
        while (l >= 0 && result.size() + buckets[l].size() <= k) {
            result.insert(result.end(), buckets[l].begin(), buckets[l].end());
            --l;
        }
        if (l >= 0 && result.size() < k) {
            // Sub-buckets: equal leading t+1 bits of the distance to self,
            // closest first.
            std::vector<std::pair<Id256, PeerId>> by_dist;
            for (const auto& p : buckets[l]) by_dist.push_back({p ^ self, p});
            std::sort(by_dist.begin(), by_dist.end());
            const std::size_t bits = std::min<std::size_t>(t + 1, 256);
            std::size_t i = 0;
            while (i < by_dist.size()) {
                std::size_t j = i + 1;
                while (j < by_dist.size() && same_prefix(by_dist[i].first, by_dist[j].first, bits)) ++j;
                std::vector<PeerId> sub;
                for (std::size_t x = i; x < j; ++x) sub.push_back(by_dist[x].second);
                if (result.size() + sub.size() <= k) {
                    result.insert(result.end(), sub.begin(), sub.end());
                } else {
                    pick_random(std::move(sub), k - result.size(), rng, result);
                    break;
                }
                i = j;
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<PeerId> normalize(const RoutingTable& rt, std::size_t t, Prg& rng) {
    return normalize_buckets(rt.self(), rt.bucket_ids(), t, rt.k(), rng);
}

void AddressBook::set(const PeerId& p, ByteSpan addr) {
    if (addr.empty() || addr.size() > kAddressBytes) throw InvalidArgument("multiaddress must be 1..76 bytes");
    if (addr.back() == 0) throw InvalidArgument("multiaddress must not end in a zero byte");
    book_[p] = Bytes(addr.begin(), addr.end());
}

const Bytes* AddressBook::find(const PeerId& p) const {
    auto it = book_.find(p);
    return it == book_.end() ? nullptr : &it->second;
}

Bytes make_multiaddr(std::uint32_t ipv4, std::uint16_t port) {
    std::string s = "/ip4/" + std::to_string(ipv4 >> 24) + "." + std::to_string((ipv4 >> 16) & 0xff) + "." +
                    std::to_string((ipv4 >> 8) & 0xff) + "." + std::to_string(ipv4 & 0xff) + "/tcp/" +
                    std::to_string(port);
    return Bytes(s.begin(), s.end());
}

std::size_t routing_row_width(std::size_t k) { return pir::framed_size(k * kEntryBytes); }

Bytes encode_bucket(const std::vector<PeerRecord>& bucket, std::size_t k) {
    if (bucket.size() > k) throw InvalidArgument("bucket holds more than k entries");
    Bytes out(bucket.size() * kEntryBytes, 0);
    for (std::size_t i = 0; i < bucket.size(); ++i) {
        std::uint8_t* dst = out.data() + i * kEntryBytes;
        std::memcpy(dst, bucket[i].id.bytes.data(), 32);
        if (bucket[i].addr.size() > kAddressBytes) throw InvalidArgument("multiaddress too long");
        std::memcpy(dst + 32, bucket[i].addr.data(), bucket[i].addr.size());
    }
    return out;
}

std::vector<PeerRecord> decode_bucket(ByteSpan record) {
    if (record.size() % kEntryBytes != 0) throw WireFormatError("bucket record has a partial entry");
    std::vector<PeerRecord> out(record.size() / kEntryBytes);
    for (std::size_t i = 0; i < out.size(); ++i) {
        ByteSpan e = record.subspan(i * kEntryBytes, kEntryBytes);
        out[i].id = Id256::from_span(e.first(32));
        ByteSpan a = e.subspan(32);
        std::size_t len = a.size();
        while (len > 0 && a[len - 1] == 0) --len;
        if (len == 0) throw WireFormatError("bucket entry without an address");
        out[i].addr.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(len));
    }
    return out;
}

NormalizedRoutingTable::NormalizedRoutingTable(const RoutingTable& rt, const AddressBook& book, const Seed& seed)
    : k_(rt.k()), seed_(seed) {
    if (rt.empty()) return;
    const auto ids = rt.bucket_ids();
    buckets_.resize(ids.size());
    for (std::size_t t = 0; t < ids.size(); ++t) {
        Prg rng(seed, t);
        for (const auto& p : normalize_buckets(rt.self(), ids, t, k_, rng)) {
            const Bytes* addr = book.find(p);
            if (!addr) {
                ++missing_;
                continue;
            }
            buckets_[t].push_back({p, *addr});
        }
    }
}

const std::vector<PeerRecord>& NormalizedRoutingTable::lookup(std::size_t t) const {
    if (buckets_.empty()) throw InvalidArgument("empty routing table");
    return buckets_[std::min(t, buckets_.size() - 1)];
}

std::size_t NormalizedRoutingTable::row_width() const { return routing_row_width(k_); }

Bytes NormalizedRoutingTable::serialize_row(std::size_t i) const { return encode_bucket(bucket(i), k_); }

NormalizedRoutingTable build_normalized(const RoutingTable& rt, const AddressBook& book, const Seed& seed) {
    return NormalizedRoutingTable(rt, book, seed);
}

}  // namespace p2pir::routing
