#pragma once

#include <utility>
#include <vector>

#include "p2pir/pir/pir.hpp"
#include "p2pir/routing/routing_table.hpp"

namespace p2pir::routing {

// The routing table is always queried as a 256-row table; the server folds
// the rows past its last bucket onto the last bucket.
inline constexpr std::size_t kRoutingRows = kMaxBuckets;

std::size_t target_index(const PeerId& target, const PeerId& server);

std::pair<pir::ClientState, pir::PirQueryBundle> private_peer_query(const PeerId& target, const PeerId& server,
                                                                    pir::SchemeId scheme, Prg& rng,
                                                                    pir::ClientKeys* keys = nullptr,
                                                                    std::size_t k = kBucketSize);

pir::PirDatabase routing_database(const NormalizedRoutingTable& nrt);

pir::PirAnswer private_peer_respond(const NormalizedRoutingTable& nrt, const pir::PirQueryBundle& q,
                                    unsigned threads = 1, pir::KeyCache* cache = nullptr);

std::vector<PeerRecord> private_peer_extract(const pir::ClientState& st, const pir::PirAnswer& a);

}  // namespace p2pir::routing
