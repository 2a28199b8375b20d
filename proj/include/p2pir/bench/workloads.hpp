#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "p2pir/content/content.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/provider/provider_store.hpp"
#include "p2pir/routing/routing_table.hpp"

namespace p2pir::bench {

enum class Usecase { Routing, Provider, Block };

const char* usecase_name(Usecase u);
std::optional<Usecase> parse_usecase(std::string_view name);

// Random full buckets of k peers with addresses, one record per row.
std::vector<routing::PeerRecord> random_bucket(Prg& rng, std::size_t k = routing::kBucketSize);
pir::PirDatabase random_routing_db(Prg& rng, std::size_t rows = 256);

struct ProviderWorkload {
    provider::ProviderStore store;
    routing::AddressBook book;
    std::vector<Cid> cids;
    std::vector<PeerId> providers;
};

// `ads` advertisements over distinct random CIDs, each naming one of
// `provider_count` providers with a random address.
ProviderWorkload make_provider_workload(std::size_t ads, Prg& rng, std::uint64_t now,
                                        std::size_t provider_count = 1000);

content::BlockStore make_block_store(std::size_t blocks, std::size_t block_bytes, Prg& rng);

// Table a use case queries: routing (256 rows), provider bins (4096 rows,
// `items` ads), or encrypted blocks (`items` blocks of 256 KB).
pir::PirDatabase usecase_db(Usecase u, std::size_t items, Prg& rng);
std::size_t usecase_rows(Usecase u, std::size_t items);

struct Stats {
    double mean = 0;
    double stddev = 0;
};
Stats summarize(const std::vector<double>& xs);

}  // namespace p2pir::bench
