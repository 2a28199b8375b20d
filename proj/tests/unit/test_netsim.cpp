#include <gtest/gtest.h>

#include "p2pir/common/errors.hpp"
#include "p2pir/netsim/netsim.hpp"

using namespace p2pir;
using namespace p2pir::netsim;

namespace {

Bytes block_of(std::uint8_t fill, std::size_t len) { return Bytes(len, fill); }

}  // namespace

TEST(Frames, RoundTripAndMalformed) {
    const Bytes body = {1, 2, 3};
    const Bytes f = make_frame(MessageKind::ProvQuery, body);
    EXPECT_EQ(f.size(), 1 + 4 + 3u);
    const auto [kind, back] = parse_frame(f);
    EXPECT_EQ(kind, MessageKind::ProvQuery);
    EXPECT_EQ(back, body);
    EXPECT_THROW(parse_frame(Bytes{9, 0, 0, 0, 0}), WireFormatError);
    EXPECT_THROW(parse_frame(Bytes{1, 0, 0, 0, 4, 1}), WireFormatError);
    EXPECT_STREQ(kind_name(MessageKind::BlockResp), "BLOCK_R");
}

TEST(Simulator, SameSeedSameNetworkAndTraces) {
    SimNetwork a(120, 5), b(120, 5), c(120, 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.peer(i).id, b.peer(i).id);
        EXPECT_EQ(a.peer(i).rt.peers(), b.peer(i).rt.peers());
    }
    EXPECT_NE(a.peer(0).id, c.peer(0).id);
    for (std::size_t l = 0; l < 5; ++l) {
        const PeerId target = a.peer((l * 37 + 11) % a.size()).id;
        const auto ta = a.iterative_lookup(l, target, LookupMode::Private);
        const auto tb = b.iterative_lookup(l, target, LookupMode::Private);
        EXPECT_EQ(ta.rounds, tb.rounds);
        EXPECT_EQ(ta.bytes_up, tb.bytes_up);
        EXPECT_EQ(ta.bytes_down, tb.bytes_down);
    }
}

TEST(Simulator, PlainAndPrivateLookupsTakeTheSameHops) {
    SimNetwork net(200, 7);
    for (std::size_t l = 0; l < 12; ++l) {
        const std::size_t client = (l * 13) % net.size();
        const PeerId target = net.peer((l * 71 + 5) % net.size()).id;
        const auto plain = net.iterative_lookup(client, target, LookupMode::Plain);
        const auto priv = net.iterative_lookup(client, target, LookupMode::Private);
        EXPECT_TRUE(plain.success);
        EXPECT_TRUE(priv.success);
        EXPECT_EQ(plain.hops, priv.hops) << l;
        if (plain.rounds.empty()) {
            EXPECT_EQ(priv.bytes_up, 0u);
        } else {
            EXPECT_GT(priv.bytes_up, plain.bytes_up);
        }
    }
}

TEST(Simulator, TargetInRoutingTableIsOneHop) {
    SimNetwork net(100, 8);
    const PeerId known = net.peer(3).rt.peers().at(0);
    const auto t = net.iterative_lookup(3, known, LookupMode::Plain);
    EXPECT_TRUE(t.success);
    EXPECT_EQ(t.hops, 1u);
}

TEST(Simulator, EndToEndFetchWithoutLeaks) {
    SimNetwork net(100, 9);
    const Bytes block = block_of(0x5a, 4000);
    const Cid c = net.publish_block(17, block);
    net.watch(c);
    net.watch(net.peer(17).id);
    const FetchResult r = net.end_to_end_fetch(60, c);
    ASSERT_TRUE(r.block.has_value()) << r.failure;
    EXPECT_EQ(*r.block, block);
    EXPECT_EQ(net.leaks(), 0u);
    EXPECT_GT(net.frames_scanned(), 0u);
    EXPECT_GT(r.bytes_up, 0u);

    const Cid absent = Id256::hash_of(as_bytes("never published"));
    EXPECT_FALSE(net.end_to_end_fetch(60, absent).block.has_value());
}

TEST(Simulator, LeakScanCatchesPlainLookups) {
    SimNetwork net(80, 10);
    const Id256 target = Id256::hash_of(as_bytes("not a peer"));
    net.watch(target);
    net.iterative_lookup(2, target, LookupMode::Plain);
    EXPECT_GT(net.leaks(), 0u);
}

TEST(Simulator, ChurnKeepsTablesConsistent) {
    SimNetwork net(150, 11);
    for (int i = 0; i < 5; ++i) net.publish_block(i, block_of(std::uint8_t(i), 500));
    for (int step = 0; step < 3; ++step) {
        net.advance(3600);
        net.churn_step(0.1, 0.05, 0.1);
        for (std::size_t i = 0; i < net.size(); ++i) {
            const SimPeer& p = net.peer(i);
            if (!p.online) continue;
            for (const PeerId& q : p.rt.peers()) {
                const auto idx = net.index_of(q);
                ASSERT_TRUE(idx.has_value());
                EXPECT_TRUE(net.peer(*idx).online);
                EXPECT_NE(p.book.find(q), nullptr);
            }
            EXPECT_TRUE(net.provider_table(i) == provider::build_binned(p.ads, p.book, net.now())) << i;
            EXPECT_EQ(net.normalized(i).rows(), p.rt.empty() ? 0 : p.rt.last_index() + 1);
        }
    }
    EXPECT_LT(net.online_count(), net.size());
}
