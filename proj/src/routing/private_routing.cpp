#include "p2pir/routing/private_routing.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"

namespace p2pir::routing {

std::size_t target_index(const PeerId& target, const PeerId& server) {
    return std::min<std::size_t>(static_cast<std::size_t>(cpl(target, server)), kRoutingRows - 1);
}

std::pair<pir::ClientState, pir::PirQueryBundle> private_peer_query(const PeerId& target, const PeerId& server,
                                                                    pir::SchemeId scheme, Prg& rng,
                                                                    pir::ClientKeys* keys, std::size_t k) {
    return pir::query(scheme, target_index(target, server), kRoutingRows, routing_row_width(k), rng, keys);
}

pir::PirDatabase routing_database(const NormalizedRoutingTable& nrt) {
    std::vector<Bytes> rows;
    rows.reserve(std::max<std::size_t>(nrt.rows(), 1));
    for (std::size_t i = 0; i < nrt.rows(); ++i) rows.push_back(nrt.serialize_row(i));
    if (rows.empty()) rows.emplace_back();
    return pir::PirDatabase(rows, nrt.row_width());
}

pir::PirAnswer private_peer_respond(const NormalizedRoutingTable& nrt, const pir::PirQueryBundle& q,
                                    unsigned threads, pir::KeyCache* cache) {
    if (q.declared_rows != kRoutingRows) throw InvalidArgument("routing queries must declare 256 rows");
    pir::RespondOptions opts;
    opts.fold_tail = true;
    opts.threads = threads;
    opts.key_cache = cache;
    return pir::respond(routing_database(nrt), q, opts);
}

std::vector<PeerRecord> private_peer_extract(const pir::ClientState& st, const pir::PirAnswer& a) {
    return decode_bucket(pir::extract(st, a));
}

}  // namespace p2pir::routing
