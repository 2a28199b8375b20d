#include "p2pir/netsim/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/hash.hpp"
#include "p2pir/routing/private_routing.hpp"

namespace p2pir::netsim {

namespace {

// Streams of the network seed.
constexpr std::uint64_t kStreamMain = 0;
constexpr std::uint64_t kStreamClientKeys = 1ull << 32;
constexpr std::uint64_t kStreamNormalize = 2ull << 32;

double unit(Prg& rng) { return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53; }

// Random id sharing exactly `bits` leading bits with base.
Id256 id_with_cpl(const Id256& base, std::size_t bits, Prg& rng) {
    Id256 id = random_id(rng);
    for (std::size_t b = 0; b < bits; ++b) id.set_bit(b, base.bit(b));
    if (bits < 256) id.set_bit(bits, !base.bit(bits));
    return id;
}

}  // namespace

const char* kind_name(MessageKind k) {
    switch (k) {
        case MessageKind::PeerQuery: return "PEER_QUERY";
        case MessageKind::PeerResp: return "PEER_RESP";
        case MessageKind::ProvQuery: return "PROV_QUERY";
        case MessageKind::ProvResp: return "PROV_RESP";
        case MessageKind::WantHaveQuery: return "WANTHAVE_Q";
        case MessageKind::WantHaveResp: return "WANTHAVE_R";
        case MessageKind::BlockQuery: return "BLOCK_Q";
        case MessageKind::BlockResp: return "BLOCK_R";
    }
    return "UNKNOWN";
}

Bytes make_frame(MessageKind kind, ByteSpan body) {
    if (body.size() > 0xffffffffu) throw InvalidArgument("frame body too large");
    ByteWriter w(5 + body.size());
    w.u8(static_cast<std::uint8_t>(kind));
    w.segment(body);
    return w.take();
}

std::pair<MessageKind, Bytes> parse_frame(ByteSpan frame) {
    ByteReader r(frame);
    const std::uint8_t k = r.u8();
    if (k < 1 || k > 8) throw WireFormatError("unknown message kind");
    ByteSpan body = r.segment();
    r.expect_done();
    return {static_cast<MessageKind>(k), Bytes(body.begin(), body.end())};
}

SimNetwork::SimNetwork(std::size_t n_peers, std::uint64_t seed, SimConfig config)
    : config_(config), rng_(crypto::seed_from_u64(seed), kStreamMain), seed_(crypto::seed_from_u64(seed)), now_(config.start_time) {
    if (n_peers == 0) throw InvalidArgument("network needs at least one peer");
    if (config_.k == 0 || config_.alpha == 0) throw InvalidArgument("k and alpha must be positive");
    peers_.reserve(n_peers);
    for (std::size_t i = 0; i < n_peers; ++i) {
        PeerId id = random_id(rng_);
        while (index_.count(id)) id = random_id(rng_);
        auto p = std::make_unique<SimPeer>(id, config_.k);
        p->addr = routing::make_multiaddr(0x0A000000u + static_cast<std::uint32_t>(i + 1), 4001);
        index_[id] = i;
        by_addr_[p->addr] = i;
        peers_.push_back(std::move(p));
    }
    caches_.resize(n_peers);
    bootstrap();
}

std::optional<std::size_t> SimNetwork::index_of(const PeerId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t SimNetwork::online_count() const {
    return static_cast<std::size_t>(std::count_if(peers_.begin(), peers_.end(), [](const auto& p) { return p->online; }));
}

void SimNetwork::set_online(std::size_t i, bool online) { peers_.at(i)->online = online; }

void SimNetwork::learn(std::size_t owner, std::size_t other) {
    if (owner == other || !peers_[other]->online) return;
    SimPeer& p = *peers_[owner];
    if (p.rt.insert(peers_[other]->id, now_)) {
        p.book.set(peers_[other]->id, peers_[other]->addr);
        ++caches_[owner].rt_version;
    }
}

void SimNetwork::forget(std::size_t owner, const PeerId& other) {
    if (peers_[owner]->rt.remove(other)) ++caches_[owner].rt_version;
}

void SimNetwork::bootstrap() {
    const std::size_t n = peers_.size();
    if (n == 1) return;
    const std::size_t sample = std::min(config_.bootstrap_sample, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::size_t> chosen;
        while (chosen.size() < sample) {
            std::size_t j = static_cast<std::size_t>(rng_.uniform(n));
            if (j != i) chosen.insert(j);
        }
        for (std::size_t j : chosen) learn(i, j);
    }
    std::size_t refresh = config_.refresh_buckets;
    if (refresh == 0)
        refresh = static_cast<std::size_t>(std::ceil(std::log2(std::max<double>(2.0, double(n) / double(config_.k))))) + 3;
    for (std::size_t i = 0; i < n; ++i) {
        lookup_impl(i, peers_[i]->id, LookupMode::Plain, true);
        for (std::size_t b = 0; b < refresh; ++b)
            lookup_impl(i, id_with_cpl(peers_[i]->id, b, rng_), LookupMode::Plain, true);
    }
}

Bytes SimNetwork::send(std::size_t from, std::size_t to, MessageKind kind, ByteSpan body) {
    Bytes frame = make_frame(kind, body);
    log_.push_back({from, to, frame.size(), kind});
    if (!watch_.empty()) {
        ++frames_scanned_;
        for (const Id256& pattern : watch_)
            if (contains_subsequence(frame, pattern.span())) ++leaks_;
    }
    if (capture_) captured_.push_back(frame);
    return frame;
}

std::size_t SimNetwork::total_bytes() const {
    std::size_t total = 0;
    for (const auto& m : log_) total += m.bytes;
    return total;
}

void SimNetwork::watch(const Id256& pattern) { watch_.push_back(pattern); }

void SimNetwork::clear_watch() {
    watch_.clear();
    leaks_ = 0;
    frames_scanned_ = 0;
}

const routing::NormalizedRoutingTable& SimNetwork::normalized(std::size_t i) {
    PeerCaches& c = caches_.at(i);
    if (c.nrt_version != c.rt_version) {
        Seed s = Prg(seed_, kStreamNormalize + i).next_seed();
        c.nrt = routing::build_normalized(peers_[i]->rt, peers_[i]->book, s);
        c.nrt_version = c.rt_version;
    }
    return c.nrt;
}

const provider::BinnedTable& SimNetwork::provider_table(std::size_t i) {
    PeerCaches& c = caches_.at(i);
    if (!c.prov_table)
        c.prov_table = std::make_unique<provider::BinnedTable>(
            provider::build_binned(peers_[i]->ads, peers_[i]->book, now_));
    return *c.prov_table;
}

pir::KeyCache& SimNetwork::key_cache(std::size_t i) {
    PeerCaches& c = caches_.at(i);
    if (!c.key_cache) c.key_cache = std::make_unique<pir::KeyCache>(16);
    return *c.key_cache;
}

pir::ClientKeys& SimNetwork::client_keys(std::size_t i) {
    PeerCaches& c = caches_.at(i);
    if (!c.keys) c.keys = std::make_unique<pir::ClientKeys>(Prg(seed_, kStreamClientKeys + i).next_seed());
    return *c.keys;
}

std::optional<std::vector<routing::PeerRecord>> SimNetwork::ask_peers(std::size_t client, std::size_t server,
                                                                      const Id256& target, LookupMode mode,
                                                                      LookupTrace& trace) {
    SimPeer& srv = *peers_[server];
    if (mode == LookupMode::Plain) {
        Bytes up = send(client, server, MessageKind::PeerQuery, target.span());
        trace.bytes_up += up.size();
        if (!srv.online) return std::nullopt;
        Id256 asked = Id256::from_span(parse_frame(up).second);
        std::vector<routing::PeerRecord> recs;
        for (const PeerId& p : srv.rt.nearest(asked, config_.k))
            if (const Bytes* a = srv.book.find(p)) recs.push_back({p, *a});
        Bytes down = send(server, client, MessageKind::PeerResp, routing::encode_bucket(recs, config_.k));
        trace.bytes_down += down.size();
        return routing::decode_bucket(parse_frame(down).second);
    }
    auto [st, bundle] =
        routing::private_peer_query(target, srv.id, config_.routing_scheme, rng_, &client_keys(client), config_.k);
    Bytes up = send(client, server, MessageKind::PeerQuery, bundle.serialize());
    trace.bytes_up += up.size();
    if (!srv.online) return std::nullopt;
    pir::PirQueryBundle received = pir::PirQueryBundle::deserialize(parse_frame(up).second);
    pir::PirAnswer ans = routing::private_peer_respond(normalized(server), received, config_.threads, &key_cache(server));
    Bytes down = send(server, client, MessageKind::PeerResp, ans.serialize());
    trace.bytes_down += down.size();
    return routing::private_peer_extract(st, pir::PirAnswer::deserialize(parse_frame(down).second));
}

LookupTrace SimNetwork::iterative_lookup(std::size_t client, const Id256& target, LookupMode mode) {
    if (!peers_.at(client)->online) throw InvalidArgument("client is offline");
    return lookup_impl(client, target, mode, false);
}

LookupTrace SimNetwork::lookup_impl(std::size_t client, const Id256& target, LookupMode mode, bool learn_peers) {
    LookupTrace trace;
    trace.target = target;
    trace.mode = mode;
    const PeerId& self = peers_[client]->id;
    const bool peer_target = index_.count(target) > 0 && target != self;

    std::map<Id256, PeerId> known;  // by distance to target
    std::set<PeerId> queried;
    for (const PeerId& p : peers_[client]->rt.nearest(target, config_.k)) known.emplace(p ^ target, p);

    for (std::size_t round = 0; round < config_.max_rounds; ++round) {
        if (peer_target && known.count(target ^ target)) {
            trace.success = true;
            trace.hops = trace.rounds.size() + 1;
            break;
        }
        if (!peer_target) {
            // Converged once the alpha closest known peers have all answered or failed.
            std::size_t seen = 0;
            bool open = false;
            for (auto it = known.begin(); it != known.end() && seen < config_.alpha; ++it, ++seen)
                open |= queried.count(it->second) == 0;
            if (!open) break;
        }
        std::vector<PeerId> contacted;
        std::vector<std::vector<routing::PeerRecord>> responses;
        std::size_t answered = 0;
        std::size_t rank = 0;
        for (auto it = known.begin(); it != known.end() && rank < config_.k && answered < config_.alpha; ++it, ++rank) {
            const PeerId& p = it->second;
            if (queried.count(p)) continue;
            queried.insert(p);
            auto idx = index_of(p);
            if (!idx) continue;
            contacted.push_back(p);
            auto resp = ask_peers(client, *idx, target, mode, trace);
            if (!resp) {
                if (learn_peers) forget(client, p);
                continue;
            }
            ++answered;
            if (learn_peers) {
                learn(client, *idx);
                learn(*idx, client);
            }
            responses.push_back(std::move(*resp));
        }
        if (contacted.empty()) break;
        trace.rounds.push_back(std::move(contacted));
        for (const auto& recs : responses)
            for (const auto& r : recs) {
                if (r.id == self) continue;
                known.emplace(r.id ^ target, r.id);
                if (learn_peers)
                    if (auto idx = index_of(r.id)) learn(client, *idx);
            }
    }
    if (!peer_target) {
        trace.success = !known.empty();
        trace.hops = trace.rounds.size();
    }
    for (auto it = known.begin(); it != known.end() && trace.closest.size() < config_.k; ++it)
        trace.closest.push_back(it->second);
    return trace;
}

std::vector<std::size_t> SimNetwork::closest_online(const Id256& target, std::size_t count) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < peers_.size(); ++i)
        if (peers_[i]->online) idx.push_back(i);
    count = std::min(count, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                      [&](std::size_t a, std::size_t b) { return closer(target, peers_[a]->id, peers_[b]->id); });
    idx.resize(count);
    return idx;
}

Cid SimNetwork::publish_block(std::size_t provider, ByteSpan block) {
    Cid c = peers_.at(provider)->blocks.add(block);
    publish_provider(provider, c);
    return c;
}

void SimNetwork::publish_provider(std::size_t provider, const Cid& c) {
    const SimPeer& prov = *peers_.at(provider);
    for (std::size_t i : closest_online(c, config_.k)) {
        SimPeer& holder = *peers_[i];
        holder.ads.add(c, prov.id, now_);
        holder.book.set(prov.id, prov.addr);
        if (caches_[i].prov_table) provider::refresh_binned(*caches_[i].prov_table, holder.ads, holder.book, c, now_);
    }
}

FetchResult SimNetwork::end_to_end_fetch(std::size_t client, const Cid& c) {
    FetchResult res;
    res.lookup = iterative_lookup(client, c, LookupMode::Private);
    res.bytes_up = res.lookup.bytes_up;
    res.bytes_down = res.lookup.bytes_down;
    std::optional<std::vector<Bytes>> addrs;
    for (const PeerId& p : res.lookup.closest) {
        auto idx = index_of(p);
        if (!idx) continue;
        ++res.provider_queries;
        auto [st, bundle] = provider::prov_ad_query(c, config_.provider_scheme, rng_, &client_keys(client));
        Bytes up = send(client, *idx, MessageKind::ProvQuery, bundle.serialize());
        res.bytes_up += up.size();
        if (!peers_[*idx]->online) continue;
        auto received = pir::PirQueryBundle::deserialize(parse_frame(up).second);
        pir::PirAnswer ans = provider::prov_ad_respond(provider_table(*idx), received, config_.threads, &key_cache(*idx));
        Bytes down = send(*idx, client, MessageKind::ProvResp, ans.serialize());
        res.bytes_down += down.size();
        addrs = provider::prov_ad_extract(st, pir::PirAnswer::deserialize(parse_frame(down).second), c);
        if (addrs) break;
    }
    if (!addrs) {
        res.failure = "no provider record found";
        return res;
    }
    for (const Bytes& a : *addrs) {
        auto it = by_addr_.find(a);
        if (it == by_addr_.end() || !peers_[it->second]->online) continue;
        const std::size_t prov = it->second;
        auto [wst, wq] = content::wanthave_query(c, config_.wanthave_scheme, rng_, &client_keys(client));
        Bytes up = send(client, prov, MessageKind::WantHaveQuery, wq.serialize());
        res.bytes_up += up.size();
        auto wreceived = pir::PirQueryBundle::deserialize(parse_frame(up).second);
        content::WantHaveResponse wr =
            content::wanthave_respond(peers_[prov]->blocks, wreceived, config_.threads, &key_cache(prov));
        Bytes down = send(prov, client, MessageKind::WantHaveResp, wr.serialize());
        res.bytes_down += down.size();
        content::WantHaveResult have =
            content::wanthave_extract(wst, content::WantHaveResponse::deserialize(parse_frame(down).second), c);
        if (!have.found) continue;

        auto [bst, bq] = content::private_block_query(have.index, have.blocks, have.recommended_scheme, rng_,
                                                      &client_keys(client));
        up = send(client, prov, MessageKind::BlockQuery, bq.serialize());
        res.bytes_up += up.size();
        auto breceived = pir::PirQueryBundle::deserialize(parse_frame(up).second);
        pir::PirAnswer ba = content::private_block_respond(peers_[prov]->blocks, breceived, config_.threads,
                                                           &key_cache(prov));
        down = send(prov, client, MessageKind::BlockResp, ba.serialize());
        res.bytes_down += down.size();
        Bytes block = content::private_block_extract(bst, pir::PirAnswer::deserialize(parse_frame(down).second), c);
        if (content::cid_of(block) != c) throw DecryptionFailure("retrieved block does not hash to its CID");
        res.block = std::move(block);
        return res;
    }
    res.failure = "no provider holds the block";
    return res;
}

void SimNetwork::churn_step(double leave_rate, double join_rate, double ad_expiry_fraction) {
    const std::size_t n = peers_.size();
    std::vector<std::size_t> rejoined;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = unit(rng_);
        if (peers_[i]->online && u < leave_rate) {
            peers_[i]->online = false;
        } else if (!peers_[i]->online && u < join_rate) {
            peers_[i]->online = true;
            rejoined.push_back(i);
        }
    }
    // Liveness checks drop offline peers from every online routing table.
    for (std::size_t i = 0; i < n; ++i) {
        if (!peers_[i]->online) continue;
        for (const PeerId& p : peers_[i]->rt.peers())
            if (!peers_[index_.at(p)]->online) forget(i, p);
    }
    for (std::size_t i : rejoined) lookup_impl(i, peers_[i]->id, LookupMode::Plain, true);

    for (std::size_t i = 0; i < n; ++i) {
        SimPeer& p = *peers_[i];
        std::vector<Cid> touched = p.ads.expire(now_);
        if (ad_expiry_fraction > 0) {
            for (const Cid& c : p.ads.cids(now_)) {
                bool changed = false;
                for (const PeerId& prov : p.ads.providers(c, now_))
                    if (unit(rng_) < ad_expiry_fraction) changed |= p.ads.remove(c, prov);
                if (changed) touched.push_back(c);
            }
        }
        if (caches_[i].prov_table)
            for (const Cid& c : touched) provider::refresh_binned(*caches_[i].prov_table, p.ads, p.book, c, now_);
    }
}

}  // namespace p2pir::netsim
