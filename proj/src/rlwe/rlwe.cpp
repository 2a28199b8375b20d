#include "p2pir/rlwe/rlwe.hpp"

#include <cmath>

#include "p2pir/common/errors.hpp"
#include "p2pir/rlwe/modarith.hpp"

namespace p2pir::rlwe {

namespace {

u128 modulus_product(std::size_t limbs) {
    const auto& ctx = RingContext::instance();
    u128 q = 1;
    for (std::size_t l = 0; l < limbs; ++l) q *= ctx.modulus(l);
    return q;
}

void check_limbs(std::size_t limbs) {
    if (limbs < 1 || limbs > kMaxLimbs) throw InvalidArgument("unsupported limb count");
}

// Phase b + a*s per coefficient, reconstructed modulo the full product.
std::vector<u128> phase(const SecretKey& sk, const Ciphertext& ct) {
    const auto& ctx = RingContext::instance();
    const std::size_t limbs = ct.limbs();
    RnsPoly a = ct.a;
    RnsPoly b = ct.b;
    to_ntt(a);
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = a.limb(l);
        const std::uint64_t* s = sk.ntt.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) x[i] = mul_mod(x[i], s[i], q);
    }
    from_ntt(a);
    from_ntt(b);
    add_inplace(a, b);
    std::vector<u128> out(kDegree);
    if (limbs == 1) {
        for (std::size_t i = 0; i < kDegree; ++i) out[i] = a.limb(0)[i];
        return out;
    }
    const std::uint64_t q1 = ctx.modulus(0), q2 = ctx.modulus(1);
    const std::uint64_t q1_inv = inv_mod(q1 % q2, q2);
    for (std::size_t i = 0; i < kDegree; ++i) {
        std::uint64_t x1 = a.limb(0)[i], x2 = a.limb(1)[i];
        std::uint64_t h = mul_mod(sub_mod(x2, x1 % q2, q2), q1_inv, q2);
        out[i] = static_cast<u128>(h) * q1 + x1;
    }
    return out;
}

}  // namespace

SecretKey generate_secret_key(Prg& rng) {
    SecretKey sk;
    sk.coeffs = sample_ternary(rng);
    sk.ntt = from_signed(sk.coeffs, kMaxLimbs);
    to_ntt(sk.ntt);
    return sk;
}

Ciphertext encrypt(const SecretKey& sk, const Plaintext& m, std::size_t limbs, Prg& rng) {
    check_limbs(limbs);
    if (m.size() != kDegree) throw InvalidArgument("plaintext must have ring-degree coefficients");
    const auto& ctx = RingContext::instance();
    Ciphertext ct;
    ct.seed = rng.next_seed();
    ct.a = uniform_from_seed(*ct.seed, limbs);

    RnsPoly as = ct.a;
    to_ntt(as);
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = as.limb(l);
        const std::uint64_t* s = sk.ntt.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) x[i] = mul_mod(x[i], s[i], q);
    }
    from_ntt(as);

    auto e = sample_noise(rng);
    ct.b = from_signed(e, limbs);
    sub_inplace(ct.b, as);

    // Adds round(Q * m / t) so the only error is the sampled noise.
    const u128 big_q = modulus_product(limbs);
    for (std::size_t i = 0; i < kDegree; ++i)
        if (m[i] >= kPlainModulus) throw InvalidArgument("plaintext coefficient out of range");
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = ct.b.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) {
            if (m[i] == 0) continue;
            u128 scaled = (big_q * m[i] + kPlainModulus / 2) / kPlainModulus;
            x[i] = add_mod(x[i], static_cast<std::uint64_t>(scaled % q), q);
        }
    }
    return ct;
}

Plaintext decrypt(const SecretKey& sk, const Ciphertext& ct) {
    check_limbs(ct.limbs());
    const u128 big_q = modulus_product(ct.limbs());
    auto x = phase(sk, ct);
    Plaintext m(kDegree);
    for (std::size_t i = 0; i < kDegree; ++i) {
        u128 v = (x[i] * kPlainModulus + big_q / 2) / big_q;
        m[i] = static_cast<std::uint64_t>(v % kPlainModulus);
    }
    return m;
}

double noise_bits(const SecretKey& sk, const Ciphertext& ct, const Plaintext& expected) {
    check_limbs(ct.limbs());
    const u128 big_q = modulus_product(ct.limbs());
    const u128 tq = big_q * kPlainModulus;
    auto x = phase(sk, ct);
    u128 worst = 0;
    for (std::size_t i = 0; i < kDegree; ++i) {
        u128 scaled = x[i] * kPlainModulus;
        u128 shift = (big_q * (expected[i] % kPlainModulus)) % tq;
        u128 v = (scaled + tq - shift) % tq;
        u128 mag = v > tq / 2 ? tq - v : v;
        if (mag > worst) worst = mag;
    }
    long double noise = static_cast<long double>(worst) / kPlainModulus;
    if (noise < 1) return 0.0;
    return static_cast<double>(std::log2(noise));
}

double noise_threshold_bits(std::size_t limbs) {
    check_limbs(limbs);
    long double q = static_cast<long double>(modulus_product(limbs));
    return static_cast<double>(std::log2(q / (2.0L * kPlainModulus)));
}

void mod_switch_to_data(Ciphertext& ct) {
    if (ct.limbs() == 1) {
        to_ntt(ct);
        return;
    }
    if (ct.limbs() != 2) throw InvalidArgument("unsupported limb count");
    from_ntt(ct);
    const auto& ctx = RingContext::instance();
    const std::uint64_t q1 = ctx.modulus(0), q2 = ctx.modulus(1);
    const std::uint64_t q2_inv = inv_mod(q2 % q1, q1);
    const std::uint64_t q2_inv_shoup = shoup(q2_inv, q1);
    auto drop = [&](RnsPoly& p) {
        RnsPoly out(1, false);
        for (std::size_t i = 0; i < kDegree; ++i) {
            std::uint64_t low = centered_lift(p.limb(1)[i], q2, q1);
            out.limb(0)[i] = mul_shoup(sub_mod(p.limb(0)[i], low, q1), q2_inv, q2_inv_shoup, q1);
        }
        p = std::move(out);
        to_ntt(p);
    };
    drop(ct.b);
    drop(ct.a);
    ct.seed.reset();
}

void prepare_for_evaluation(Ciphertext& ct) {
    mod_switch_to_data(ct);
    ct.seed.reset();
}

void to_ntt(Ciphertext& ct) {
    to_ntt(ct.b);
    to_ntt(ct.a);
}

void from_ntt(Ciphertext& ct) {
    from_ntt(ct.b);
    from_ntt(ct.a);
}

void add_inplace(Ciphertext& x, const Ciphertext& y) {
    add_inplace(x.b, y.b);
    add_inplace(x.a, y.a);
    x.seed.reset();
}

void sub_inplace(Ciphertext& x, const Ciphertext& y) {
    sub_inplace(x.b, y.b);
    sub_inplace(x.a, y.a);
    x.seed.reset();
}

RnsPoly lift_plaintext(const Plaintext& p, std::size_t limbs) {
    if (p.size() != kDegree) throw InvalidArgument("plaintext must have ring-degree coefficients");
    std::vector<std::int64_t> c(kDegree);
    for (std::size_t i = 0; i < kDegree; ++i) {
        std::uint64_t v = p[i] % kPlainModulus;
        c[i] = v > kPlainModulus / 2 ? static_cast<std::int64_t>(v) - static_cast<std::int64_t>(kPlainModulus)
                                     : static_cast<std::int64_t>(v);
    }
    RnsPoly out = from_signed(c, limbs);
    to_ntt(out);
    return out;
}

void multiply_plain_inplace(Ciphertext& ct, const Plaintext& p) {
    to_ntt(ct);
    RnsPoly lifted = lift_plaintext(p, ct.limbs());
    mul_pointwise_inplace(ct.b, lifted);
    mul_pointwise_inplace(ct.a, lifted);
    ct.seed.reset();
}

Ciphertext zero_ciphertext(std::size_t limbs, bool ntt) {
    check_limbs(limbs);
    Ciphertext ct;
    ct.b = RnsPoly(limbs, ntt);
    ct.a = RnsPoly(limbs, ntt);
    return ct;
}

void write_poly(ByteWriter& w, const RnsPoly& p) {
    RnsPoly coeff = p;
    from_ntt(coeff);
    auto& out = w.bytes();
    std::size_t base = out.size();
    out.resize(base + coeff.data.size() * 8);
    std::uint8_t* dst = out.data() + base;
    for (std::uint64_t v : coeff.data) {
        for (int k = 0; k < 8; ++k) *dst++ = static_cast<std::uint8_t>(v >> (8 * k));
    }
}

RnsPoly read_poly(ByteReader& r, std::size_t limbs) {
    check_limbs(limbs);
    const auto& ctx = RingContext::instance();
    RnsPoly p(limbs, false);
    ByteSpan raw = r.raw(limbs * kPolyBytes);
    const std::uint8_t* src = raw.data();
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = p.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) {
            std::uint64_t v = 0;
            for (int k = 7; k >= 0; --k) v = (v << 8) | src[k];
            src += 8;
            if (v >= q) throw WireFormatError("polynomial coefficient out of range");
            x[i] = v;
        }
    }
    return p;
}

void serialize_into(ByteWriter& w, const Ciphertext& ct) {
    w.u8(ct.seed ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(ct.limbs()));
    if (ct.seed) {
        w.raw(*ct.seed);
        write_poly(w, ct.b);
    } else {
        write_poly(w, ct.b);
        write_poly(w, ct.a);
    }
}

Bytes serialize(const Ciphertext& ct) {
    ByteWriter w(2 + 32 + 2 * ct.limbs() * kPolyBytes);
    serialize_into(w, ct);
    return w.take();
}

Ciphertext deserialize_ciphertext(ByteReader& r) {
    std::uint8_t flag = r.u8();
    std::size_t limbs = r.u8();
    if (flag > 1) throw WireFormatError("bad ciphertext flag");
    if (limbs < 1 || limbs > kMaxLimbs) throw WireFormatError("bad ciphertext limb count");
    Ciphertext ct;
    if (flag == 1) {
        Seed seed;
        auto raw = r.raw(seed.size());
        std::copy(raw.begin(), raw.end(), seed.begin());
        ct.seed = seed;
        ct.b = read_poly(r, limbs);
        ct.a = uniform_from_seed(seed, limbs);
    } else {
        ct.b = read_poly(r, limbs);
        ct.a = read_poly(r, limbs);
    }
    return ct;
}

Ciphertext deserialize_ciphertext(ByteSpan data) {
    ByteReader r(data);
    Ciphertext ct = deserialize_ciphertext(r);
    r.expect_done();
    return ct;
}

}  // namespace p2pir::rlwe
