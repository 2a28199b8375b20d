#include "p2pir/bench/workloads.hpp"

#include <cmath>

#include "p2pir/common/errors.hpp"
#include "p2pir/routing/private_routing.hpp"

namespace p2pir::bench {

const char* usecase_name(Usecase u) {
    switch (u) {
        case Usecase::Routing: return "routing";
        case Usecase::Provider: return "provider";
        case Usecase::Block: return "block";
    }
    return "unknown";
}

std::optional<Usecase> parse_usecase(std::string_view name) {
    for (Usecase u : {Usecase::Routing, Usecase::Provider, Usecase::Block})
        if (name == usecase_name(u)) return u;
    return std::nullopt;
}

std::vector<routing::PeerRecord> random_bucket(Prg& rng, std::size_t k) {
    std::vector<routing::PeerRecord> out(k);
    for (auto& r : out) {
        r.id = random_id(rng);
        r.addr = routing::make_multiaddr(rng.next_u32(), static_cast<std::uint16_t>(1024 + rng.uniform(60000)));
    }
    return out;
}

pir::PirDatabase random_routing_db(Prg& rng, std::size_t rows) {
    std::vector<Bytes> recs(rows);
    for (auto& r : recs) r = routing::encode_bucket(random_bucket(rng));
    return pir::PirDatabase(recs, routing::routing_row_width());
}

ProviderWorkload make_provider_workload(std::size_t ads, Prg& rng, std::uint64_t now, std::size_t provider_count) {
    ProviderWorkload w;
    provider_count = std::max<std::size_t>(provider_count, 1);
    for (std::size_t i = 0; i < provider_count; ++i) {
        PeerId p = random_id(rng);
        w.providers.push_back(p);
        w.book.set(p, routing::make_multiaddr(rng.next_u32(), static_cast<std::uint16_t>(1024 + rng.uniform(60000))));
    }
    w.cids.reserve(ads);
    for (std::size_t i = 0; i < ads; ++i) {
        Cid c = random_id(rng);
        w.cids.push_back(c);
        w.store.add(c, w.providers[rng.uniform(provider_count)], now);
    }
    return w;
}

content::BlockStore make_block_store(std::size_t blocks, std::size_t block_bytes, Prg& rng) {
    content::BlockStore store;
    while (store.size() < blocks) {
        Bytes b(block_bytes);
        rng.fill(b);
        store.add(b);
    }
    return store;
}

std::size_t usecase_rows(Usecase u, std::size_t items) {
    switch (u) {
        case Usecase::Routing: return routing::kRoutingRows;
        case Usecase::Provider: return provider::kBins;
        case Usecase::Block: return std::max<std::size_t>(items, 1);
    }
    throw InvalidArgument("unknown use case");
}

pir::PirDatabase usecase_db(Usecase u, std::size_t items, Prg& rng) {
    switch (u) {
        case Usecase::Routing:
            return random_routing_db(rng);
        case Usecase::Provider: {
            const std::uint64_t now = 1'700'000'000;
            ProviderWorkload w = make_provider_workload(items, rng, now);
            return *provider::build_binned(w.store, w.book, now).database();
        }
        case Usecase::Block:
            return *make_block_store(std::max<std::size_t>(items, 1), content::kBlockBytes, rng).block_table();
    }
    throw InvalidArgument("unknown use case");
}

Stats summarize(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace p2pir::bench
