#include "p2pir/rlwe/expansion.hpp"

#include <algorithm>
#include <deque>

#include "p2pir/common/errors.hpp"
#include "p2pir/common/parallel.hpp"
#include "p2pir/rlwe/modarith.hpp"
#include "kernels.hpp"

namespace p2pir::rlwe {

const char* variant_name(KeyVariant v) {
    switch (v) {
        case KeyVariant::LogN: return "logn";
        case KeyVariant::Three: return "three";
        case KeyVariant::Two: return "two";
    }
    return "unknown";
}

std::uint32_t level_target(unsigned level) {
    if (level >= kLogDegree) throw InvalidArgument("expansion level out of range");
    return static_cast<std::uint32_t>(kDegree >> level) + 1;
}

std::vector<std::uint32_t> generator_exponents(KeyVariant variant, unsigned levels) {
    if (levels > kLogDegree) throw InvalidArgument("levels exceed log2 of ring degree");
    switch (variant) {
        case KeyVariant::LogN: {
            std::vector<std::uint32_t> out;
            for (unsigned i = 0; i < levels; ++i) out.push_back(level_target(i));
            return out;
        }
        case KeyVariant::Three: return {3, 5, 1167};
        case KeyVariant::Two: return {3, 1173};
    }
    throw InvalidArgument("unsupported key variant");
}

GeneratorReach::GeneratorReach(std::span<const std::uint32_t> generators)
    : dist_(kTwoN, -1), parent_(kTwoN, 0), via_(kTwoN, 0) {
    std::deque<std::uint32_t> queue{1};
    dist_[1] = 0;
    reached_ = 1;
    while (!queue.empty()) {
        std::uint32_t x = queue.front();
        queue.pop_front();
        for (std::uint32_t g : generators) {
            std::uint32_t y = static_cast<std::uint32_t>(std::uint64_t{x} * g % kTwoN);
            if (dist_[y] >= 0) continue;
            dist_[y] = dist_[x] + 1;
            parent_[y] = x;
            via_[y] = g;
            ++reached_;
            queue.push_back(y);
        }
    }
}

bool GeneratorReach::reachable(std::uint32_t g) const { return g < kTwoN && dist_[g] >= 0; }

int GeneratorReach::distance(std::uint32_t g) const { return g < kTwoN ? dist_[g] : -1; }

std::vector<std::uint32_t> GeneratorReach::chain(std::uint32_t g) const {
    if (!reachable(g)) throw InvalidArgument("exponent not reachable from the generators");
    std::vector<std::uint32_t> out;
    while (g != 1) {
        out.push_back(via_[g]);
        g = parent_[g];
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> plan_level_exponents(const GeneratorReach& reach, unsigned levels) {
    std::vector<std::uint32_t> out;
    for (unsigned i = 0; i < levels; ++i) {
        const std::uint32_t modulus = kTwoN >> i;
        const std::uint32_t target = level_target(i);
        std::uint32_t best = 0;
        int best_dist = -1;
        for (std::uint32_t g = target % modulus; g < kTwoN; g += modulus) {
            int d = reach.distance(g);
            if (d < 0) continue;
            if (best_dist < 0 || d < best_dist) {
                best = g;
                best_dist = d;
            }
        }
        if (best_dist < 0) throw InvalidArgument("expansion level not reachable with this key set");
        out.push_back(best);
    }
    return out;
}

RlweKeyMaterial generate_keys(const SecretKey& sk, KeyVariant variant, unsigned levels, Prg& rng) {
    if (levels > kLogDegree) throw InvalidArgument("levels exceed log2 of ring degree");
    const auto& ctx = RingContext::instance();
    const std::uint64_t q1 = ctx.modulus(0);
    const std::uint64_t p_mod_q1 = ctx.modulus(1) % q1;

    RlweKeyMaterial km;
    km.variant = variant;
    km.levels = levels;
    for (std::uint32_t g : generator_exponents(variant, levels)) {
        AutomorphismKey key;
        key.exponent = g;
        key.seed = rng.next_seed();
        RnsPoly a = uniform_from_seed(key.seed, kMaxLimbs);
        to_ntt(a);
        mul_pointwise_inplace(a, sk.ntt);  // a*s
        RnsPoly b = from_signed(sample_noise(rng), kMaxLimbs);
        to_ntt(b);
        sub_inplace(b, a);  // -a*s + e
        RnsPoly s_g = apply_automorphism(sk.ntt, g);
        std::uint64_t* b0 = b.limb(0);
        const std::uint64_t* sg0 = s_g.limb(0);
        for (std::size_t i = 0; i < kDegree; ++i)
            b0[i] = add_mod(b0[i], mul_mod(p_mod_q1, sg0[i], q1), q1);
        from_ntt(b);
        key.b = std::move(b);
        km.keys.push_back(std::move(key));
    }
    return km;
}

Bytes serialize(const RlweKeyMaterial& km) {
    ByteWriter w(8 + km.keys.size() * (4 + 32 + kMaxLimbs * kPolyBytes));
    w.u8(static_cast<std::uint8_t>(km.variant));
    w.u8(static_cast<std::uint8_t>(km.levels));
    w.u32be(static_cast<std::uint32_t>(km.keys.size()));
    for (const auto& key : km.keys) {
        w.u32be(key.exponent);
        w.raw(key.seed);
        write_poly(w, key.b);
    }
    return w.take();
}

RlweKeyMaterial deserialize_key_material(ByteSpan data) {
    ByteReader r(data);
    RlweKeyMaterial km;
    std::uint8_t v = r.u8();
    if (v < 1 || v > 3) throw WireFormatError("unknown key variant");
    km.variant = static_cast<KeyVariant>(v);
    km.levels = r.u8();
    if (km.levels > kLogDegree) throw WireFormatError("levels out of range");
    std::uint32_t count = r.u32be();
    if (count > kLogDegree) throw WireFormatError("too many automorphism keys");
    for (std::uint32_t k = 0; k < count; ++k) {
        AutomorphismKey key;
        key.exponent = r.u32be();
        if (key.exponent % 2 == 0 || key.exponent >= kTwoN) throw WireFormatError("bad exponent");
        auto seed = r.raw(32);
        std::copy(seed.begin(), seed.end(), key.seed.begin());
        key.b = read_poly(r, kMaxLimbs);
        km.keys.push_back(std::move(key));
    }
    r.expect_done();
    return km;
}

namespace {

std::vector<std::uint32_t> exponents_of(const RlweKeyMaterial& km) {
    std::vector<std::uint32_t> out;
    for (const auto& k : km.keys) out.push_back(k.exponent);
    return out;
}

RnsPoly shoup_table(const RnsPoly& p) {
    const auto& ctx = RingContext::instance();
    RnsPoly out(p.limbs, p.ntt_form);
    for (std::size_t l = 0; l < p.limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        for (std::size_t i = 0; i < kDegree; ++i) out.limb(l)[i] = shoup(p.limb(l)[i], q);
    }
    return out;
}

}  // namespace

ExpansionKeys::ExpansionKeys(const RlweKeyMaterial& km)
    : variant_(km.variant), levels_(km.levels), reach_(exponents_of(km)) {
    const auto& ctx = RingContext::instance();
    p_inv_ = inv_mod(ctx.modulus(1) % ctx.modulus(0), ctx.modulus(0));
    p_inv_shoup_ = shoup(p_inv_, ctx.modulus(0));
    for (const auto& key : km.keys) {
        PreparedKey pk;
        pk.exponent = key.exponent;
        pk.k0 = key.b;
        to_ntt(pk.k0);
        pk.k1 = uniform_from_seed(key.seed, kMaxLimbs);
        to_ntt(pk.k1);
        pk.k0_shoup = shoup_table(pk.k0);
        pk.k1_shoup = shoup_table(pk.k1);
        keys_.push_back(std::move(pk));
    }
    // Plan only the levels this key set can serve.
    unsigned plannable = 0;
    while (plannable < kLogDegree) {
        try {
            level_exponents_ = plan_level_exponents(reach_, plannable + 1);
        } catch (const InvalidArgument&) {
            break;
        }
        ++plannable;
    }
    if (plannable < levels_) throw InvalidArgument("key set cannot serve its declared levels");
    level_exponents_.resize(plannable);
}

const ExpansionKeys::PreparedKey& ExpansionKeys::key_for(std::uint32_t g) const {
    for (const auto& k : keys_)
        if (k.exponent == g) return k;
    throw InvalidArgument("no automorphism key for exponent");
}

std::uint32_t ExpansionKeys::level_exponent(unsigned level) const {
    if (level >= level_exponents_.size()) throw InvalidArgument("insufficient keys for level");
    return level_exponents_[level];
}

std::size_t ExpansionKeys::base_substitutions(unsigned levels) const {
    std::size_t total = 0;
    for (unsigned i = 0; i < levels; ++i)
        total += (std::size_t{1} << i) * static_cast<std::size_t>(reach_.distance(level_exponent(i)));
    return total;
}

Ciphertext ExpansionKeys::substitute_base(const Ciphertext& ct, std::uint32_t g) const {
    if (ct.limbs() != 1 || !ct.ntt_form()) throw InvalidArgument("substitution expects a transformed data-prime ciphertext");
    const PreparedKey& key = key_for(g);
    const auto& ctx = RingContext::instance();
    const NttTables& ntt_q = ctx.ntt(0);
    const NttTables& ntt_p = ctx.ntt(1);
    const std::uint64_t q = ctx.modulus(0), p = ctx.modulus(1);
    const auto& map = ctx.automorphism_map(g);
    constexpr std::size_t n = kDegree;

    Ciphertext out;
    out.b = RnsPoly(1, true);
    out.a = RnsPoly(1, true);
    std::uint64_t* b_out = out.b.limb(0);
    std::uint64_t* a_out = out.a.limb(0);
    // Scratch: permuted a, its special-prime image, and four products.
    std::vector<std::uint64_t> scratch(6 * n);
    std::uint64_t* a_perm = scratch.data();
    std::uint64_t* digit = a_perm + n;
    std::uint64_t* u0q = digit + n;
    std::uint64_t* u1q = u0q + n;
    std::uint64_t* u0p = u1q + n;
    std::uint64_t* u1p = u0p + n;

    kernels::gather(ct.b.limb(0), map.data(), b_out, n);
    kernels::gather(ct.a.limb(0), map.data(), a_perm, n);

    std::copy(a_perm, a_perm + n, digit);
    ntt_q.inverse(digit);
    kernels::lift_up(digit, q, p, n);
    ntt_p.forward(digit);

    kernels::mul_shoup(a_perm, key.k0.limb(0), key.k0_shoup.limb(0), q, u0q, n);
    kernels::mul_shoup(a_perm, key.k1.limb(0), key.k1_shoup.limb(0), q, u1q, n);
    kernels::mul_shoup(digit, key.k0.limb(1), key.k0_shoup.limb(1), p, u0p, n);
    kernels::mul_shoup(digit, key.k1.limb(1), key.k1_shoup.limb(1), p, u1p, n);

    ntt_p.inverse(u0p);
    ntt_p.inverse(u1p);
    kernels::lift_down(u0p, p, q, n);
    kernels::lift_down(u1p, p, q, n);
    ntt_q.forward(u0p);
    ntt_q.forward(u1p);

    // Divide by the special prime with rounding.
    kernels::add_scaled_diff(b_out, u0q, u0p, p_inv_, p_inv_shoup_, q, n);
    kernels::scaled_diff(u1q, u1p, p_inv_, p_inv_shoup_, q, a_out, n);
    return out;
}

Ciphertext ExpansionKeys::substitute(const Ciphertext& ct, std::uint32_t g) const {
    Ciphertext cur = ct;
    cur.seed.reset();
    for (std::uint32_t base : reach_.chain(g)) cur = substitute_base(cur, base);
    return cur;
}

namespace {

struct LevelStep {
    std::uint32_t exponent;
    std::vector<std::uint64_t> shift, shift_shoup;  // transformed X^{-2^i}
};

std::vector<LevelStep> level_steps(const ExpansionKeys& keys, unsigned levels, bool literal) {
    const std::uint64_t q = RingContext::instance().modulus(0);
    std::vector<LevelStep> steps;
    for (unsigned i = 0; i < levels; ++i) {
        LevelStep st;
        st.exponent = literal ? level_target(i) : keys.level_exponent(i);
        RnsPoly shift(1, false);
        shift.limb(0)[kDegree - (std::size_t{1} << i)] = q - 1;  // -X^{N - 2^i}
        to_ntt(shift);
        st.shift.assign(shift.limb(0), shift.limb(0) + kDegree);
        st.shift_shoup.resize(kDegree);
        for (std::size_t j = 0; j < kDegree; ++j) st.shift_shoup[j] = shoup(st.shift[j], q);
        steps.push_back(std::move(st));
    }
    return steps;
}

// Replaces c with c + Sub(c) and returns X^{-2^i} (c - Sub(c)).
Ciphertext split(const ExpansionKeys& keys, const LevelStep& st, Ciphertext& c) {
    const std::uint64_t q = RingContext::instance().modulus(0);
    Ciphertext s = keys.substitute(c, st.exponent);
    Ciphertext hi = c;
    sub_inplace(hi, s);
    add_inplace(c, s);
    for (RnsPoly* poly : {&hi.b, &hi.a})
        kernels::mul_shoup(poly->limb(0), st.shift.data(), st.shift_shoup.data(), q, poly->limb(0), kDegree);
    return hi;
}

void descend(const ExpansionKeys& keys, const std::vector<LevelStep>& steps, unsigned level,
             std::size_t index, Ciphertext c, std::size_t subtree, std::size_t limit,
             const ExpandVisitor& visit) {
    if (index >= limit) return;
    if (level == steps.size()) {
        visit(subtree, index, c);
        return;
    }
    const std::size_t step = std::size_t{1} << level;
    Ciphertext hi = split(keys, steps[level], c);
    descend(keys, steps, level + 1, index, std::move(c), subtree, limit, visit);
    descend(keys, steps, level + 1, index + step, std::move(hi), subtree, limit, visit);
}

void check_expandable(const Ciphertext& ct, unsigned levels) {
    if (levels > kLogDegree) throw InvalidArgument("levels exceed log2 of ring degree");
    if (ct.limbs() != 1 || !ct.ntt_form())
        throw InvalidArgument("expansion expects a transformed data-prime ciphertext");
}

}  // namespace

std::size_t expansion_subtrees(unsigned levels, unsigned threads) {
    unsigned split_levels = 0;
    while (split_levels < levels && (1u << split_levels) < std::max(1u, threads)) ++split_levels;
    return std::size_t{1} << split_levels;
}

std::size_t expand_depth_first(const ExpansionKeys& keys, const Ciphertext& ct, unsigned levels,
                               unsigned threads, const ExpandVisitor& visit, std::size_t limit,
                               bool literal_exponents) {
    check_expandable(ct, levels);
    auto steps = level_steps(keys, levels, literal_exponents);
    const std::size_t subtrees = expansion_subtrees(levels, threads);
    unsigned split_levels = 0;
    while ((std::size_t{1} << split_levels) < subtrees) ++split_levels;

    // Breadth-first over the top levels, then one worker per subtree.
    std::vector<Ciphertext> roots(subtrees);
    roots[0] = ct;
    roots[0].seed.reset();
    for (unsigned i = 0; i < split_levels; ++i) {
        const std::size_t half = std::size_t{1} << i;
        parallel_for(0, half, threads, [&](std::size_t j) { roots[j + half] = split(keys, steps[i], roots[j]); });
    }
    parallel_for(0, subtrees, threads, [&](std::size_t k) {
        descend(keys, steps, split_levels, k, std::move(roots[k]), k, limit, visit);
    });
    return subtrees;
}

std::vector<Ciphertext> oblivious_expand(const ExpansionKeys& keys, const Ciphertext& ct,
                                         unsigned levels, unsigned threads,
                                         bool literal_exponents) {
    std::vector<Ciphertext> out(std::size_t{1} << levels);
    expand_depth_first(
        keys, ct, levels, threads,
        [&](std::size_t, std::size_t index, const Ciphertext& c) { out[index] = c; }, SIZE_MAX,
        literal_exponents);
    return out;
}

}  // namespace p2pir::rlwe
