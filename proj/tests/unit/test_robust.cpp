#include <gtest/gtest.h>

#include "p2pir/common/errors.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/crypto/hash.hpp"
#include "p2pir/crypto/robust.hpp"

using namespace p2pir;
using namespace p2pir::crypto;

namespace {

Prg test_rng(std::uint64_t stream) {
    Seed s{};
    s[0] = 0x94;
    return Prg(s, stream);
}

}  // namespace

TEST(Hashes, KnownAnswers) {
    EXPECT_EQ(to_hex(sha256(as_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // RFC 4231 test case 2.
    EXPECT_EQ(to_hex(hmac_sha256(as_bytes("Jefe"), as_bytes("what do ya want for nothing?"))),
              "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
    EXPECT_EQ(to_hex(shake256(as_bytes(""), 8)), "46b9dd2b0ba88d13");
    EXPECT_EQ(hkdf_sha256(as_bytes("k"), "info", 50).size(), 50u);
}

TEST(Hashes, HkdfMatchesRfc5869CaseThree) {
    // Zero-length salt and info.
    const Bytes ikm(22, 0x0b);
    EXPECT_EQ(to_hex(hkdf_sha256(ikm, "", 42)),
              "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8");
}

TEST(Kdf, LabelsAreSeparated) {
    Prg rng = test_rng(1);
    const Cid c = random_id(rng);
    EXPECT_NE(kdf(c, kLabelProviderAds), kdf(c, kLabelWantHave));
    EXPECT_NE(kdf(c, kLabelWantHave), kdf(c, kLabelContentBlock));
    EXPECT_EQ(kdf(c, kLabelContentBlock), kdf(c, kLabelContentBlock));
    EXPECT_THROW(kdf(c, "other"), InvalidArgument);
}

TEST(RobustCipherTest, RoundTripAndDeterminism) {
    Prg rng = test_rng(2);
    const RobustCipher ce(kdf(random_id(rng), kLabelProviderAds));
    for (std::size_t len : {0u, 1u, 15u, 16u, 1000u}) {
        Bytes pt(len);
        rng.fill(pt);
        const Bytes ct = ce.encrypt(pt);
        EXPECT_EQ(ct.size(), len + RobustCipher::kOverhead);
        EXPECT_EQ(ce.decrypt(ct), pt);
        EXPECT_EQ(ce.encrypt(pt), ct);
    }
}

TEST(RobustCipherTest, WrongKeysAndTamperingFail) {
    Prg rng = test_rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Cid a = random_id(rng), b = random_id(rng);
        Bytes pt(1 + rng.uniform(100));
        rng.fill(pt);
        const Bytes ct = RobustCipher(kdf(a, kLabelContentBlock)).encrypt(pt);
        EXPECT_FALSE(RobustCipher(kdf(b, kLabelContentBlock)).decrypt(ct).has_value());
        EXPECT_FALSE(RobustCipher(kdf(a, kLabelProviderAds)).decrypt(ct).has_value());
        Bytes bad = ct;
        bad[rng.uniform(bad.size())] ^= std::uint8_t(1 + rng.uniform(255));
        EXPECT_FALSE(RobustCipher(kdf(a, kLabelContentBlock)).decrypt(bad).has_value());
    }
    const RobustCipher ce(kdf(random_id(rng), kLabelWantHave));
    EXPECT_FALSE(ce.decrypt(Bytes(10)).has_value());
    EXPECT_FALSE(ce.decrypt(Bytes(RobustCipher::kOverhead)).has_value());
}

TEST(RobustCipherTest, RandomBytesNeverDecrypt) {
    Prg rng = test_rng(4);
    const RobustCipher ce(kdf(random_id(rng), kLabelProviderAds));
    for (int i = 0; i < 1000; ++i) {
        Bytes junk(RobustCipher::kOverhead + rng.uniform(64));
        rng.fill(junk);
        ASSERT_FALSE(ce.decrypt(junk).has_value());
    }
}
