#include <gtest/gtest.h>

#include <cmath>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/robust.hpp"
#include "p2pir/provider/provider_store.hpp"

using namespace p2pir;
using namespace p2pir::provider;

namespace {

constexpr std::uint64_t kNow = 1'700'000'000;

Prg test_rng(std::uint64_t stream) {
    Seed s{};
    s[0] = 0xa5;
    return Prg(s, stream);
}

Cid cid_in_bin(std::size_t bin, Prg& rng) {
    Cid c = random_id(rng);
    for (std::size_t i = 0; i < kBinBits; ++i) c.set_bit(i, (bin >> (kBinBits - 1 - i)) & 1);
    return c;
}

struct World {
    ProviderStore store;
    routing::AddressBook book;
    std::vector<Cid> cids;
    std::vector<PeerId> providers;
};

World make_world(Prg& rng, std::size_t ads, std::size_t providers) {
    World w;
    for (std::size_t i = 0; i < providers; ++i) {
        w.providers.push_back(random_id(rng));
        w.book.set(w.providers.back(), routing::make_multiaddr(rng.next_u32(), 4001));
    }
    for (std::size_t i = 0; i < ads; ++i) {
        w.cids.push_back(random_id(rng));
        w.store.add(w.cids.back(), w.providers[rng.uniform(providers)], kNow);
    }
    return w;
}

pir::ClientKeys& keys() {
    static pir::ClientKeys k(test_rng(77).next_seed());
    return k;
}

}  // namespace

TEST(Binning, IndexIsTheLeadingTwelveBits) {
    Prg rng = test_rng(1);
    for (std::size_t b : {0u, 1u, 2048u, 4095u}) EXPECT_EQ(bin_index(cid_in_bin(b, rng)), b);
    Cid c{};
    c.bytes[0] = 0xab;
    c.bytes[1] = 0xcd;
    EXPECT_EQ(bin_index(c), 0xabcu);
}

TEST(Binning, LoadStaysInsidePoissonEnvelope) {
    Prg rng = test_rng(2);
    BinnedTable t(crypto::kLabelProviderAds);
    for (int i = 0; i < 10000; ++i) t.put(random_id(rng), Bytes{1});
    const double mean = 10000.0 / kBins, sigma = std::sqrt(mean);
    std::size_t total = 0;
    for (std::size_t b = 0; b < kBins; ++b) {
        EXPECT_LE(double(t.bin_records(b)), mean + 5 * sigma);
        total += t.bin_records(b);
    }
    EXPECT_EQ(total, 10000u);
    EXPECT_EQ(t.records(), 10000u);
}

TEST(ProviderStoreTest, AddRemoveExpire) {
    Prg rng = test_rng(3);
    ProviderStore s;
    const Cid c = random_id(rng);
    const PeerId p = random_id(rng), q = random_id(rng);
    s.add(c, p, kNow, 100);
    s.add(c, p, kNow, 50);  // keeps the later expiry
    EXPECT_EQ(s.expiry(c, p), kNow + 100);
    s.add(c, q, kNow, 10);
    EXPECT_EQ(s.providers(c, kNow).size(), 2u);
    EXPECT_EQ(s.providers(c, kNow + 10).size(), 1u);
    EXPECT_EQ(s.expire(kNow + 10), std::vector<Cid>{c});
    EXPECT_EQ(s.size(), 1u);
    EXPECT_TRUE(s.remove(c, p));
    EXPECT_FALSE(s.remove(c, p));
    EXPECT_TRUE(s.cids(kNow).empty());
}

TEST(AddressLists, SortedAndDeduplicated) {
    const Bytes a = {'/', 'b'}, b = {'/', 'a'};
    const Bytes enc = encode_address_list({a, b, a});
    EXPECT_EQ(decode_address_list(enc), (std::vector<Bytes>{b, a}));
    EXPECT_THROW(decode_address_list(Bytes{5, 1}), WireFormatError);
    EXPECT_THROW(encode_address_list({Bytes(256, 1)}), InvalidArgument);
}

TEST(ProviderRecords, JoinLiveProvidersWithAddresses) {
    Prg rng = test_rng(4);
    World w = make_world(rng, 0, 3);
    const Cid c = random_id(rng);
    EXPECT_FALSE(provider_record(w.store, w.book, c, kNow).has_value());
    w.store.add(c, w.providers[0], kNow);
    w.store.add(c, w.providers[1], kNow, 5);
    w.store.add(c, random_id(rng), kNow);  // no address known
    const auto rec = provider_record(w.store, w.book, c, kNow);
    ASSERT_TRUE(rec);
    EXPECT_EQ(decode_address_list(*rec).size(), 2u);
    EXPECT_EQ(decode_address_list(*provider_record(w.store, w.book, c, kNow + 5)).size(), 1u);
}

TEST(BinnedTableTest, IncrementalSnapshotsEqualFullRebuild) {
    Prg rng = test_rng(5);
    BinnedTable t(crypto::kLabelProviderAds);
    std::map<Cid, Bytes> content;
    for (int step = 0; step < 3000; ++step) {
        if (!content.empty() && rng.uniform(4) == 0) {
            auto it = content.begin();
            std::advance(it, rng.uniform(content.size()));
            EXPECT_TRUE(t.erase(it->first));
            content.erase(it);
        } else {
            const Cid c = rng.uniform(3) == 0 ? cid_in_bin(rng.uniform(4), rng) : random_id(rng);
            Bytes v(1 + rng.uniform(rng.uniform(20) == 0 ? 400 : 40));
            rng.fill(v);
            t.put(c, v);
            content[c] = v;
        }
        if (step % 97 == 0) t.database();
    }
    BinnedTable fresh(crypto::kLabelProviderAds);
    for (const auto& [c, v] : content) fresh.put(c, v);
    EXPECT_TRUE(t == fresh);
    EXPECT_EQ(t.database()->serialize(), fresh.database()->serialize());
    EXPECT_EQ(t.row_width(), fresh.row_width());
}

TEST(BinnedTableTest, BinsOpenOnlyUnderTheirCid) {
    Prg rng = test_rng(6);
    BinnedTable t(crypto::kLabelProviderAds);
    const Cid a = cid_in_bin(9, rng), b = cid_in_bin(9, rng), absent = cid_in_bin(9, rng);
    t.put(a, Bytes{1, 2});
    t.put(b, Bytes{3});
    EXPECT_EQ(split_bin(t.bin_bytes(9)).size(), 2u);
    const auto ra = open_bin(t.bin_bytes(9), a, crypto::kLabelProviderAds);
    EXPECT_EQ(ra.value, (Bytes{1, 2}));
    EXPECT_EQ(ra.successes, 1u);
    EXPECT_EQ(ra.records, 2u);
    EXPECT_FALSE(open_bin(t.bin_bytes(9), absent, crypto::kLabelProviderAds).value.has_value());
    EXPECT_FALSE(open_bin(t.bin_bytes(9), a, crypto::kLabelWantHave).value.has_value());
}

TEST(BinnedTableTest, RefreshMatchesFullBuild) {
    Prg rng = test_rng(7);
    World w = make_world(rng, 400, 20);
    BinnedTable t = build_binned(w.store, w.book, kNow);
    for (int i = 0; i < 50; ++i) {
        const Cid c = w.cids[rng.uniform(w.cids.size())];
        if (rng.uniform(2)) w.store.add(c, w.providers[rng.uniform(20)], kNow);
        else
            for (const auto& p : w.store.providers(c, kNow)) w.store.remove(c, p);
        refresh_binned(t, w.store, w.book, c, kNow);
    }
    EXPECT_TRUE(t == build_binned(w.store, w.book, kNow));
}

TEST(SymmetricPir, ForeignRecordsReplacedByRandomBytesChangeNothing) {
    Prg rng = test_rng(8);
    World w = make_world(rng, 1000, 50);
    const BinnedTable real = build_binned(w.store, w.book, kNow);
    for (int trial = 0; trial < 100; ++trial) {
        const bool present = trial % 2 == 0;
        const Cid c = present ? w.cids[rng.uniform(w.cids.size())] : random_id(rng);
        // Every record except the queried one becomes random bytes of equal length.
        BinnedTable fake(crypto::kLabelProviderAds);
        for (const Cid& other : real.cids()) {
            if (other == c) {
                fake.put(other, *provider_record(w.store, w.book, other, kNow));
            } else {
                Bytes junk(provider_record(w.store, w.book, other, kNow)->size() + crypto::RobustCipher::kOverhead);
                rng.fill(junk);
                fake.put_ciphertext(other, junk);
            }
        }
        auto [st, q] = prov_ad_query(c, pir::SchemeId::TrivialS, rng);
        const ProvAdResult r1 = prov_ad_open(st, prov_ad_respond(real, q), c);
        const ProvAdResult r2 = prov_ad_open(st, prov_ad_respond(fake, q), c);
        ASSERT_EQ(r1.successes, present ? 1u : 0u);
        ASSERT_EQ(r1.successes, r2.successes);
        ASSERT_EQ(r1.addresses, r2.addresses);
        ASSERT_EQ(r1.records, r2.records);
    }
}

TEST(ProviderAds, RlweRoundTripPresentAndAbsent) {
    Prg rng = test_rng(9);
    World w = make_world(rng, 2000, 30);
    const BinnedTable t = build_binned(w.store, w.book, kNow);
    const Cid present = w.cids[5];
    auto [st, q] = prov_ad_query(present, pir::SchemeId::Rlwe3, rng, &keys());
    EXPECT_EQ(q.declared_rows, kBins);
    const auto got = prov_ad_extract(st, prov_ad_respond(t, q), present);
    ASSERT_TRUE(got);
    EXPECT_EQ(encode_address_list(*got), *provider_record(w.store, w.book, present, kNow));
    const Cid absent = random_id(rng);
    auto [st2, q2] = prov_ad_query(absent, pir::SchemeId::Rlwe3, rng, &keys());
    EXPECT_FALSE(prov_ad_extract(st2, prov_ad_respond(t, q2), absent).has_value());
}

TEST(ProviderAds, DuplicateDecryptionsSignalCorruption) {
    Prg rng = test_rng(10);
    BinnedTable t(crypto::kLabelProviderAds);
    const Cid c = cid_in_bin(77, rng), twin = cid_in_bin(77, rng);
    t.put(c, encode_address_list({routing::make_multiaddr(1, 1)}));
    const auto recs = split_bin(t.bin_bytes(77));
    t.put_ciphertext(twin, recs.at(0));
    auto [st, q] = prov_ad_query(c, pir::SchemeId::Trivial, rng);
    EXPECT_THROW(prov_ad_open(st, prov_ad_respond(t, q), c), StoreCorruption);
}
