#include <gtest/gtest.h>

#include "p2pir/common/errors.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/rlwe/rlwe_pir.hpp"

using namespace p2pir;
using namespace p2pir::rlwe;

namespace {

Prg test_rng(std::uint64_t stream) {
    Seed s{};
    s[0] = 0x4d;
    return Prg(s, stream);
}

pir::PirDatabase random_db(Prg& rng, std::size_t rows, std::size_t record_len) {
    std::vector<Bytes> recs(rows, Bytes(record_len));
    for (auto& r : recs) rng.fill(r);
    return pir::PirDatabase(recs);
}

// Smallest margin between the response noise and the decryption threshold.
double response_margin(const RlweClientSecret& secret, const Bytes& payload, const pir::PirDatabase& db) {
    ByteReader r(payload);
    const unsigned bits = r.u8();
    const std::uint32_t cells = r.u32be();
    double worst = 1e9;
    for (std::uint32_t c = 0; c < cells; ++c) {
        const Ciphertext ct = deserialize_ciphertext(r);
        const Plaintext want = encode_cell(db.row(secret.index), c, bits);
        worst = std::min(worst, noise_threshold_bits(ct.limbs()) - noise_bits(secret.sk, ct, want));
    }
    return worst;
}

}  // namespace

TEST(RlwePirSizing, LevelsAndQueryCount) {
    EXPECT_EQ(expansion_levels(1), 0u);
    EXPECT_EQ(expansion_levels(2), 1u);
    EXPECT_EQ(expansion_levels(16), 4u);
    EXPECT_EQ(expansion_levels(17), 5u);
    EXPECT_EQ(expansion_levels(256), 8u);
    EXPECT_EQ(expansion_levels(4096), 12u);
    EXPECT_EQ(expansion_levels(10000), 12u);
    EXPECT_EQ(query_ciphertexts(4096), 1u);
    EXPECT_EQ(query_ciphertexts(4097), 2u);
    EXPECT_EQ(query_ciphertexts(10000), 3u);
}

TEST(RlwePirSizing, CellCapacity) {
    for (unsigned bits = 1; bits <= 8; ++bits) {
        EXPECT_EQ(cell_capacity(bits), kDegree * bits / 8);
        EXPECT_EQ(cells_for_width(cell_capacity(bits), bits), 1u);
        EXPECT_EQ(cells_for_width(cell_capacity(bits) + 1, bits), 2u);
    }
    EXPECT_EQ(cells_for_width(0, 4), 1u);
}

TEST(RlwePirCells, EncodeDecodeRoundTrip) {
    Prg rng = test_rng(1);
    for (unsigned bits = 1; bits <= 8; ++bits) {
        Bytes row(cell_capacity(bits) * 2 + 17);
        rng.fill(row);
        const std::size_t cells = cells_for_width(row.size(), bits);
        Bytes back;
        for (std::size_t c = 0; c < cells; ++c) {
            const Plaintext m = encode_cell(row, c, bits);
            for (auto x : m) ASSERT_LT(x, kPlainModulus);
            Bytes part(cell_capacity(bits));
            decode_cell(m, bits, part);
            back.insert(back.end(), part.begin(), part.end());
        }
        back.resize(row.size());
        EXPECT_EQ(back, row) << "bits=" << bits;
    }
}

TEST(RlwePirCells, DecodeRejectsOutOfRangeValues) {
    Plaintext m(kDegree, 0);
    m[0] = kPlainModulus / 2;
    Bytes out(cell_capacity(4));
    EXPECT_THROW(decode_cell(m, 4, out), DecryptionFailure);
}

TEST(RlwePir, RoundTripSmallTables) {
    Prg rng = test_rng(2);
    for (auto v : {KeyVariant::LogN, KeyVariant::Three, KeyVariant::Two}) {
        for (std::size_t rows : {1u, 3u, 16u, 37u}) {
            const pir::PirDatabase db = random_db(rng, rows, 50);
            const std::size_t i = rng.uniform(rows);
            RlweQuery q = rlwe_query(v, i, rows, rng);
            const Bytes payload = rlwe_respond(v, q.key_material, q.body, db, rows);
            const Bytes row = rlwe_extract_row(q.secret, payload, db.row_width());
            EXPECT_EQ(row, Bytes(db.row(i).begin(), db.row(i).end())) << variant_name(v) << " rows=" << rows;
        }
    }
}

TEST(RlwePir, MultiCiphertextQuery) {
    Prg rng = test_rng(3);
    const std::size_t rows = 4096 + 5;
    const pir::PirDatabase db = random_db(rng, rows, 8);
    for (std::size_t i : {std::size_t{4}, std::size_t{4097}}) {
        RlweQuery q = rlwe_query(KeyVariant::LogN, i, rows, rng);
        const Bytes payload = rlwe_respond(KeyVariant::LogN, q.key_material, q.body, db, rows);
        EXPECT_EQ(rlwe_extract_row(q.secret, payload, db.row_width()), Bytes(db.row(i).begin(), db.row(i).end()));
    }
}

TEST(RlwePir, KeysForFewerLevelsAreRejected) {
    Prg rng = test_rng(4);
    RlweClientKeys keys = make_client_keys(KeyVariant::LogN, 4, rng);
    EXPECT_THROW(rlwe_query(keys, 0, 64, rng), InvalidArgument);
    EXPECT_NO_THROW(rlwe_query(keys, 0, 16, rng));
}

TEST(RlwePir, ResponseNoiseMarginAtEightLevels) {
    Prg rng = test_rng(5);
    const pir::PirDatabase db = random_db(rng, 256, 2160);
    for (auto v : {KeyVariant::LogN, KeyVariant::Three, KeyVariant::Two}) {
        RlweQuery q = rlwe_query(v, rng.uniform(256), 256, rng);
        const Bytes payload = rlwe_respond(v, q.key_material, q.body, db, 256);
        EXPECT_GE(response_margin(q.secret, payload, db), 8.0) << variant_name(v);
    }
}

TEST(RlwePir, ResponseNoiseMarginAtTwelveLevels) {
    Prg rng = test_rng(6);
    const pir::PirDatabase db = random_db(rng, 4096, 1200);
    RlweQuery q = rlwe_query(KeyVariant::Two, rng.uniform(4096), 4096, rng);
    const Bytes payload = rlwe_respond(KeyVariant::Two, q.key_material, q.body, db, 4096);
    EXPECT_GE(response_margin(q.secret, payload, db), 8.0);
}
