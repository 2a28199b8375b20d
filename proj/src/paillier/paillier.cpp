#include "p2pir/paillier/paillier.hpp"

#include <algorithm>
#include <cmath>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/hash.hpp"

namespace p2pir::paillier {

Bytes to_bytes(const mpz_class& v, std::size_t width) {
    if (v < 0) throw InvalidArgument("negative value");
    std::size_t len = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (v == 0) len = 0;
    if (len > width) throw InvalidArgument("value does not fit the encoding width");
    Bytes out(width, 0);
    std::size_t written = 0;
    if (len) mpz_export(out.data() + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

mpz_class from_bytes(ByteSpan b) {
    mpz_class v;
    if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return v;
}

mpz_class random_bits(Prg& rng, unsigned bits) {
    Bytes buf((bits + 7) / 8);
    rng.fill(buf);
    if (bits % 8) buf[0] &= static_cast<std::uint8_t>((1u << (bits % 8)) - 1);
    return from_bytes(buf);
}

mpz_class random_below(Prg& rng, const mpz_class& bound) {
    if (bound <= 0) throw InvalidArgument("bound must be positive");
    unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    for (;;) {
        mpz_class v = random_bits(rng, bits);
        if (v < bound) return v;
    }
}

namespace {

std::uint64_t modulus_tag(const mpz_class& n) {
    auto digest = crypto::sha256(to_bytes(n, (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8));
    std::uint64_t tag = 0;
    for (int i = 0; i < 8; ++i) tag = (tag << 8) | digest[i];
    return tag;
}

mpz_class random_prime(Prg& rng, unsigned bits) {
    for (;;) {
        mpz_class c = random_bits(rng, bits);
        mpz_setbit(c.get_mpz_t(), bits - 1);
        mpz_setbit(c.get_mpz_t(), bits - 2);  // product has the full bit length
        mpz_setbit(c.get_mpz_t(), 0);
        mpz_nextprime(c.get_mpz_t(), c.get_mpz_t());
        if (mpz_sizeinbase(c.get_mpz_t(), 2) == bits && mpz_probab_prime_p(c.get_mpz_t(), 40) > 0) return c;
    }
}

mpz_class l_function(const mpz_class& x, const mpz_class& d) { return (x - 1) / d; }

void check_tag(const PublicKey& pk, const Ciphertext& c) {
    if (c.tag != pk.tag) throw InvalidArgument("ciphertext under a different modulus");
}

}  // namespace

PublicKey PublicKey::from_modulus(const mpz_class& n) {
    if (n <= 1) throw InvalidArgument("invalid modulus");
    PublicKey pk;
    pk.n = n;
    pk.n2 = n * n;
    pk.g = n + 1;
    pk.tag = modulus_tag(n);
    return pk;
}

KeyPair keygen(Prg& rng, unsigned modulus_bits) {
    if (modulus_bits < 64 || modulus_bits % 2) throw InvalidArgument("unsupported modulus size");
    KeyPair kp;
    SecretKey& sk = kp.sk;
    do {
        sk.p = random_prime(rng, modulus_bits / 2);
        sk.q = random_prime(rng, modulus_bits / 2);
    } while (sk.p == sk.q);
    if (sk.p > sk.q) std::swap(sk.p, sk.q);
    kp.pk = PublicKey::from_modulus(sk.p * sk.q);
    if (mpz_sizeinbase(kp.pk.n.get_mpz_t(), 2) != modulus_bits) throw Error("modulus has the wrong size");
    sk.p2 = sk.p * sk.p;
    sk.q2 = sk.q * sk.q;
    sk.p_minus_1 = sk.p - 1;
    sk.q_minus_1 = sk.q - 1;
    mpz_class t;
    mpz_powm(t.get_mpz_t(), kp.pk.g.get_mpz_t(), sk.p_minus_1.get_mpz_t(), sk.p2.get_mpz_t());
    t = l_function(t, sk.p);
    if (mpz_invert(sk.hp.get_mpz_t(), t.get_mpz_t(), sk.p.get_mpz_t()) == 0) throw Error("degenerate key");
    mpz_powm(t.get_mpz_t(), kp.pk.g.get_mpz_t(), sk.q_minus_1.get_mpz_t(), sk.q2.get_mpz_t());
    t = l_function(t, sk.q);
    if (mpz_invert(sk.hq.get_mpz_t(), t.get_mpz_t(), sk.q.get_mpz_t()) == 0) throw Error("degenerate key");
    mpz_invert(sk.p_inv_q.get_mpz_t(), sk.p.get_mpz_t(), sk.q.get_mpz_t());
    return kp;
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Prg& rng) {
    if (m < 0 || m >= pk.n) throw InvalidArgument("plaintext outside Z_M");
    mpz_class r, g;
    do {
        r = random_below(rng, pk.n);
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
    } while (r == 0 || g != 1);
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n2.get_mpz_t());
    mpz_class c = (1 + m * pk.n) % pk.n2;  // g^m with g = M + 1
    c = c * rn % pk.n2;
    return {c, pk.tag};
}

mpz_class decrypt(const KeyPair& kp, const mpz_class& c) {
    const SecretKey& sk = kp.sk;
    if (c <= 0 || c >= kp.pk.n2) throw DecryptionFailure("ciphertext outside Z_{M^2}");
    mpz_class cp = c % sk.p2, cq = c % sk.q2, xp, xq;
    mpz_powm(xp.get_mpz_t(), cp.get_mpz_t(), sk.p_minus_1.get_mpz_t(), sk.p2.get_mpz_t());
    mpz_powm(xq.get_mpz_t(), cq.get_mpz_t(), sk.q_minus_1.get_mpz_t(), sk.q2.get_mpz_t());
    mpz_class mp = l_function(xp, sk.p) * sk.hp % sk.p;
    mpz_class mq = l_function(xq, sk.q) * sk.hq % sk.q;
    // CRT: m = mp + p * ((mq - mp) * p^-1 mod q)
    mpz_class h = (mq - mp) * sk.p_inv_q % sk.q;
    if (h < 0) h += sk.q;
    return mp + sk.p * h;
}

mpz_class decrypt(const KeyPair& kp, const Ciphertext& c) {
    check_tag(kp.pk, c);
    return decrypt(kp, c.value);
}

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
    check_tag(pk, a);
    check_tag(pk, b);
    return {a.value * b.value % pk.n2, pk.tag};
}

Ciphertext add_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m) {
    check_tag(pk, a);
    mpz_class mm = m % pk.n;
    if (mm < 0) mm += pk.n;
    mpz_class gm = (1 + mm * pk.n) % pk.n2;
    return {a.value * gm % pk.n2, pk.tag};
}

Ciphertext scal_mult(const PublicKey& pk, const Ciphertext& a, const mpz_class& s) {
    check_tag(pk, a);
    mpz_class e = s % pk.n;
    if (e < 0) e += pk.n;
    Ciphertext out{0, pk.tag};
    mpz_powm(out.value.get_mpz_t(), a.value.get_mpz_t(), e.get_mpz_t(), pk.n2.get_mpz_t());
    return out;
}

mpz_class multi_exp(std::span<const mpz_class> bases, std::span<const mpz_class> exps,
                    const mpz_class& modulus) {
    if (bases.size() != exps.size()) throw InvalidArgument("base and exponent counts differ");
    std::size_t max_bits = 0;
    std::size_t active = 0;
    for (const auto& e : exps) {
        if (e < 0) throw InvalidArgument("negative exponent");
        if (e != 0) {
            max_bits = std::max(max_bits, mpz_sizeinbase(e.get_mpz_t(), 2));
            ++active;
        }
    }
    mpz_class result = 1;
    if (active == 0) return result % modulus;
    if (active == 1) {
        for (std::size_t j = 0; j < bases.size(); ++j)
            if (exps[j] != 0) mpz_powm(result.get_mpz_t(), bases[j].get_mpz_t(), exps[j].get_mpz_t(), modulus.get_mpz_t());
        return result;
    }
    // Window width minimizing windows * (active + 2^(c+1)).
    unsigned window = 1;
    double best = 1e300;
    for (unsigned c = 1; c <= 16; ++c) {
        double cost = std::ceil(double(max_bits) / c) * (double(active) + double(1u << (c + 1))) + double(max_bits);
        if (cost < best) {
            best = cost;
            window = c;
        }
    }
    const std::size_t windows = (max_bits + window - 1) / window;
    std::vector<mpz_class> buckets(std::size_t{1} << window);
    std::vector<bool> used(buckets.size());
    mpz_class tmp;
    for (std::size_t w = windows; w-- > 0;) {
        for (unsigned s = 0; s < window; ++s) {
            mpz_mul(tmp.get_mpz_t(), result.get_mpz_t(), result.get_mpz_t());
            mpz_mod(result.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
        }
        std::fill(used.begin(), used.end(), false);
        for (std::size_t j = 0; j < bases.size(); ++j) {
            unsigned digit = 0;
            for (unsigned b = 0; b < window; ++b)
                if (mpz_tstbit(exps[j].get_mpz_t(), w * window + b)) digit |= 1u << b;
            if (digit == 0) continue;
            if (!used[digit]) {
                buckets[digit] = bases[j];
                used[digit] = true;
            } else {
                mpz_mul(tmp.get_mpz_t(), buckets[digit].get_mpz_t(), bases[j].get_mpz_t());
                mpz_mod(buckets[digit].get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
            }
        }
        // sum_d d * B_d via running products.
        mpz_class running = 1, acc = 1;
        bool any = false;
        for (std::size_t d = buckets.size() - 1; d >= 1; --d) {
            if (used[d]) {
                if (!any) {
                    running = buckets[d];
                    any = true;
                } else {
                    mpz_mul(tmp.get_mpz_t(), running.get_mpz_t(), buckets[d].get_mpz_t());
                    mpz_mod(running.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
                }
            }
            if (any) {
                mpz_mul(tmp.get_mpz_t(), acc.get_mpz_t(), running.get_mpz_t());
                mpz_mod(acc.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
            }
        }
        mpz_mul(tmp.get_mpz_t(), result.get_mpz_t(), acc.get_mpz_t());
        mpz_mod(result.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
    }
    return result;
}

}  // namespace p2pir::paillier
