#include <gtest/gtest.h>

#include "p2pir/common/errors.hpp"
#include "p2pir/content/content.hpp"
#include "p2pir/crypto/robust.hpp"

using namespace p2pir;
using namespace p2pir::content;

namespace {

Prg test_rng(std::uint64_t stream) {
    Seed s{};
    s[0] = 0xb6;
    return Prg(s, stream);
}

BlockStore make_store(Prg& rng, std::size_t blocks, std::size_t len) {
    BlockStore s;
    for (std::size_t i = 0; i < blocks; ++i) {
        Bytes b(len);
        rng.fill(b);
        s.add(b);
    }
    return s;
}

pir::ClientKeys& keys() {
    static pir::ClientKeys k(test_rng(88).next_seed());
    return k;
}

}  // namespace

TEST(Blocks, CidsAndOrdering) {
    Prg rng = test_rng(1);
    BlockStore s = make_store(rng, 20, 100);
    EXPECT_TRUE(std::is_sorted(s.cids().begin(), s.cids().end()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(cid_of(s.block(i)), s.cids()[i]);
        EXPECT_EQ(s.index_of(s.cids()[i]), i);
    }
    const Cid gone = s.cids()[4];
    EXPECT_TRUE(s.remove(gone));
    EXPECT_FALSE(s.index_of(gone).has_value());
    EXPECT_EQ(s.size(), 19u);
    EXPECT_THROW(s.add(Bytes(kBlockBytes + 1)), InvalidArgument);
    EXPECT_EQ(block_row_width(), 4 + kBlockBytes + crypto::RobustCipher::kOverhead);
}

TEST(Blocks, SchemeRecommendation) {
    EXPECT_EQ(recommend_scheme(1), pir::SchemeId::Trivial);
    EXPECT_EQ(recommend_scheme(kTrivialBlockThreshold - 1), pir::SchemeId::Trivial);
    EXPECT_EQ(recommend_scheme(kTrivialBlockThreshold), pir::SchemeId::RlweLogN);
}

TEST(WantHave, PublicHashListMatchesLinearScan) {
    Prg rng = test_rng(2);
    const BlockStore s = make_store(rng, 12, 64);
    const auto hashed = wanthave_trivial(s);
    ASSERT_EQ(hashed.size(), 12u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::optional<std::size_t> scan;
        for (std::size_t j = 0; j < hashed.size(); ++j)
            if (hashed[j] == crypto::sha256(s.cids()[i].span())) scan = j;
        EXPECT_EQ(wanthave_trivial_locate(hashed, s.cids()[i]), scan);
        EXPECT_EQ(scan, i);
    }
    EXPECT_EQ(wanthave_trivial_locate(hashed, s.cids()[7]), 7u);
    EXPECT_FALSE(wanthave_trivial_locate(hashed, random_id(rng)).has_value());
}

TEST(WantHave, PrivateLookupFindsIndexAndRecommendation) {
    Prg rng = test_rng(3);
    const BlockStore s = make_store(rng, 10, 64);
    for (auto scheme : {pir::SchemeId::TrivialS, pir::SchemeId::Rlwe3}) {
        const Cid c = s.cids()[6];
        auto [st, q] = wanthave_query(c, scheme, rng, &keys());
        const WantHaveResponse resp = WantHaveResponse::deserialize(wanthave_respond(s, q).serialize());
        const WantHaveResult r = wanthave_extract(st, resp, c);
        EXPECT_TRUE(r.found);
        EXPECT_EQ(r.index, 6u);
        EXPECT_EQ(r.blocks, 10u);
        EXPECT_EQ(r.recommended_scheme, pir::SchemeId::Trivial);
        const Cid absent = random_id(rng);
        auto [st2, q2] = wanthave_query(absent, scheme, rng, &keys());
        EXPECT_FALSE(wanthave_extract(st2, wanthave_respond(s, q2), absent).found);
    }
}

TEST(PrivateBlock, RetrievesExactBlock) {
    Prg rng = test_rng(4);
    const BlockStore s = make_store(rng, 5, 3000);
    for (auto scheme : {pir::SchemeId::Trivial, pir::SchemeId::RlweLogN}) {
        auto [st, q] = private_block_query(3, s.size(), scheme, rng, &keys());
        EXPECT_EQ(private_block_extract(st, private_block_respond(s, q), s.cids()[3]), s.block(3));
    }
}

TEST(PrivateBlock, WrongCidFailsOnEveryRow) {
    Prg rng = test_rng(5);
    const BlockStore s = make_store(rng, 8, 500);
    const Cid wrong = random_id(rng);
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [st, q] = private_block_query(i, s.size(), pir::SchemeId::Trivial, rng);
        const pir::PirAnswer a = private_block_respond(s, q);
        EXPECT_THROW(private_block_extract(st, a, wrong), DecryptionFailure) << i;
        // A real CID only opens its own row.
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j == i) EXPECT_NO_THROW(private_block_extract(st, a, s.cids()[j]));
            else EXPECT_THROW(private_block_extract(st, a, s.cids()[j]), DecryptionFailure);
        }
    }
}

TEST(PrivateBlock, TablesTrackStoreChanges) {
    Prg rng = test_rng(6);
    BlockStore s = make_store(rng, 3, 100);
    const auto before = s.block_table();
    Bytes extra(50, 7);
    const Cid c = s.add(extra);
    const auto after = s.block_table();
    EXPECT_NE(before, after);
    EXPECT_EQ(after->rows(), 4u);
    EXPECT_TRUE(s.wanthave_table().records() == 4u);
    auto [st, q] = private_block_query(*s.index_of(c), s.size(), pir::SchemeId::Trivial, rng);
    EXPECT_EQ(private_block_extract(st, private_block_respond(s, q), c), extra);
}
