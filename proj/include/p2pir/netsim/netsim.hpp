#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "p2pir/common/id.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/content/content.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/provider/provider_store.hpp"
#include "p2pir/routing/routing_table.hpp"

namespace p2pir::netsim {

enum class MessageKind : std::uint8_t {
    PeerQuery = 1,
    PeerResp = 2,
    ProvQuery = 3,
    ProvResp = 4,
    WantHaveQuery = 5,
    WantHaveResp = 6,
    BlockQuery = 7,
    BlockResp = 8,
};

const char* kind_name(MessageKind k);

// kind (1 byte) || body length (4 bytes big-endian) || body.
Bytes make_frame(MessageKind kind, ByteSpan body);
std::pair<MessageKind, Bytes> parse_frame(ByteSpan frame);

enum class LookupMode { Plain, Private };

struct SimConfig {
    std::size_t k = routing::kBucketSize;
    std::size_t alpha = 3;
    std::size_t bootstrap_sample = 30;   // random peers each peer starts with
    std::size_t refresh_buckets = 0;     // 0: enough for the network size
    std::size_t max_rounds = 32;
    pir::SchemeId routing_scheme = pir::SchemeId::RlweLogN;
    pir::SchemeId provider_scheme = pir::SchemeId::Rlwe3;
    pir::SchemeId wanthave_scheme = pir::SchemeId::Rlwe3;
    unsigned threads = 1;
    std::uint64_t start_time = 1'700'000'000;
};

struct SimPeer {
    PeerId id;
    Bytes addr;
    bool online = true;
    routing::RoutingTable rt;
    routing::AddressBook book;
    provider::ProviderStore ads;
    content::BlockStore blocks;

    explicit SimPeer(const PeerId& self, std::size_t k) : id(self), rt(self, k) {}
};

struct MessageRecord {
    std::size_t sender;
    std::size_t receiver;
    std::size_t bytes;
    MessageKind kind;
};

struct LookupTrace {
    Id256 target;
    LookupMode mode = LookupMode::Plain;
    std::vector<std::vector<PeerId>> rounds;  // peers contacted per round
    std::size_t hops = 0;
    std::size_t bytes_up = 0;
    std::size_t bytes_down = 0;
    bool success = false;
    std::vector<PeerId> closest;  // closest known peers at the end, nearest first
};

struct FetchResult {
    std::optional<Bytes> block;
    LookupTrace lookup;
    std::size_t provider_queries = 0;
    std::size_t bytes_up = 0;
    std::size_t bytes_down = 0;
    std::string failure;
};

class SimNetwork {
public:
    SimNetwork(std::size_t n_peers, std::uint64_t seed, SimConfig config = {});

    const SimConfig& config() const { return config_; }
    std::size_t size() const { return peers_.size(); }
    const SimPeer& peer(std::size_t i) const { return *peers_.at(i); }
    std::optional<std::size_t> index_of(const PeerId& id) const;
    std::size_t online_count() const;
    void set_online(std::size_t i, bool online);
    std::uint64_t now() const { return now_; }
    void advance(std::uint64_t seconds) { now_ += seconds; }
    Prg& rng() { return rng_; }

    LookupTrace iterative_lookup(std::size_t client, const Id256& target, LookupMode mode);

    // Stores the block at the provider and advertises it at the k online
    // peers closest to its CID.
    Cid publish_block(std::size_t provider, ByteSpan block);
    void publish_provider(std::size_t provider, const Cid& c);

    FetchResult end_to_end_fetch(std::size_t client, const Cid& c);

    void churn_step(double leave_rate, double join_rate, double ad_expiry_fraction);

    // Message accounting and frame scanning.
    const std::vector<MessageRecord>& log() const { return log_; }
    void clear_log() { log_.clear(); }
    std::size_t total_bytes() const;
    void watch(const Id256& pattern);
    void clear_watch();
    std::size_t leaks() const { return leaks_; }
    std::size_t frames_scanned() const { return frames_scanned_; }
    void capture_frames(bool on) { capture_ = on; }
    const std::vector<Bytes>& captured() const { return captured_; }

    const routing::NormalizedRoutingTable& normalized(std::size_t i);
    const provider::BinnedTable& provider_table(std::size_t i);
    pir::KeyCache& key_cache(std::size_t i);

private:
    void bootstrap();
    void learn(std::size_t owner, std::size_t other);
    void forget(std::size_t owner, const PeerId& other);
    Bytes send(std::size_t from, std::size_t to, MessageKind kind, ByteSpan body);
    LookupTrace lookup_impl(std::size_t client, const Id256& target, LookupMode mode, bool learn_peers);
    std::optional<std::vector<routing::PeerRecord>> ask_peers(std::size_t client, std::size_t server, const Id256& target,
                                               LookupMode mode, LookupTrace& trace);
    std::vector<std::size_t> closest_online(const Id256& target, std::size_t count) const;
    pir::ClientKeys& client_keys(std::size_t i);

    SimConfig config_;
    Prg rng_;
    Seed seed_;
    std::uint64_t now_;
    std::vector<std::unique_ptr<SimPeer>> peers_;
    std::map<PeerId, std::size_t> index_;

    struct PeerCaches {
        std::uint64_t rt_version = 1, nrt_version = 0;
        routing::NormalizedRoutingTable nrt;
        std::unique_ptr<provider::BinnedTable> prov_table;
        std::unique_ptr<pir::ClientKeys> keys;
        std::unique_ptr<pir::KeyCache> key_cache;
    };
    std::vector<PeerCaches> caches_;

    std::map<Bytes, std::size_t> by_addr_;
    std::vector<MessageRecord> log_;
    std::vector<Id256> watch_;
    std::size_t leaks_ = 0;
    std::size_t frames_scanned_ = 0;
    bool capture_ = false;
    std::vector<Bytes> captured_;
};

}  // namespace p2pir::netsim
