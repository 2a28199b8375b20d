#include "p2pir/rlwe/ring.hpp"

#include <bit>

#include "p2pir/common/errors.hpp"
#include "p2pir/rlwe/modarith.hpp"
#include "kernels.hpp"

namespace p2pir::rlwe {

RingContext::RingContext() {
    ntt_.emplace_back(kDataPrime, kLogDegree,
                      primitive_root_of_unity(kDataPrime, kDataPrimeGenerator, kTwoN));
    ntt_.emplace_back(kSpecialPrime, kLogDegree,
                      primitive_root_of_unity(kSpecialPrime, kSpecialPrimeGenerator, kTwoN));
}

const RingContext& RingContext::instance() {
    static const RingContext ctx;
    return ctx;
}

const std::vector<std::uint32_t>& RingContext::automorphism_map(std::uint32_t g) const {
    if (g % 2 == 0 || g >= kTwoN) throw InvalidArgument("automorphism exponent must be odd and < 2N");
    std::lock_guard lock(mu_);
    auto it = maps_.find(g);
    if (it != maps_.end()) return it->second;
    std::vector<std::uint32_t> map(kDegree);
    for (std::size_t j = 0; j < kDegree; ++j) {
        std::uint64_t e = 2 * bit_reverse(j, kLogDegree) + 1;
        std::uint64_t target = e * g % kTwoN;
        map[j] = static_cast<std::uint32_t>(bit_reverse((target - 1) / 2, kLogDegree));
    }
    return maps_.emplace(g, std::move(map)).first->second;
}

void to_ntt(RnsPoly& p) {
    if (p.ntt_form) return;
    const auto& ctx = RingContext::instance();
    for (std::size_t i = 0; i < p.limbs; ++i) ctx.ntt(i).forward(p.limb(i));
    p.ntt_form = true;
}

void from_ntt(RnsPoly& p) {
    if (!p.ntt_form) return;
    const auto& ctx = RingContext::instance();
    for (std::size_t i = 0; i < p.limbs; ++i) ctx.ntt(i).inverse(p.limb(i));
    p.ntt_form = false;
}

namespace {

void check_compatible(const RnsPoly& a, const RnsPoly& b) {
    if (a.limbs != b.limbs || a.ntt_form != b.ntt_form)
        throw InvalidArgument("polynomial representation mismatch");
}

}  // namespace

void add_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    const auto& ctx = RingContext::instance();
    for (std::size_t l = 0; l < a.limbs; ++l) {
        kernels::add(a.limb(l), b.limb(l), ctx.modulus(l), kDegree);
    }
}

void sub_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    const auto& ctx = RingContext::instance();
    for (std::size_t l = 0; l < a.limbs; ++l) {
        kernels::sub(a.limb(l), b.limb(l), ctx.modulus(l), kDegree);
    }
}

void negate_inplace(RnsPoly& a) {
    const auto& ctx = RingContext::instance();
    for (std::size_t l = 0; l < a.limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = a.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) x[i] = neg_mod(x[i], q);
    }
}

void mul_pointwise_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    if (!a.ntt_form) throw InvalidArgument("pointwise product needs transformed operands");
    const auto& ctx = RingContext::instance();
    for (std::size_t l = 0; l < a.limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* x = a.limb(l);
        const std::uint64_t* y = b.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) x[i] = mul_mod(x[i], y[i], q);
    }
}

RnsPoly apply_automorphism(const RnsPoly& p, std::uint32_t g) {
    const auto& ctx = RingContext::instance();
    RnsPoly out(p.limbs, p.ntt_form);
    if (p.ntt_form) {
        const auto& map = ctx.automorphism_map(g);
        for (std::size_t l = 0; l < p.limbs; ++l) kernels::gather(p.limb(l), map.data(), out.limb(l), kDegree);
        return out;
    }
    if (g % 2 == 0 || g >= kTwoN) throw InvalidArgument("automorphism exponent must be odd and < 2N");
    for (std::size_t l = 0; l < p.limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        const std::uint64_t* in = p.limb(l);
        std::uint64_t* o = out.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) {
            std::size_t k = i * g % kTwoN;
            if (k < kDegree)
                o[k] = in[i];
            else
                o[k - kDegree] = neg_mod(in[i], q);
        }
    }
    return out;
}

RnsPoly from_signed(std::span<const std::int64_t> coeffs, std::size_t limbs) {
    if (coeffs.size() != kDegree) throw InvalidArgument("coefficient count must equal ring degree");
    const auto& ctx = RingContext::instance();
    RnsPoly out(limbs, false);
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        std::uint64_t* o = out.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) {
            std::int64_t c = coeffs[i];
            o[i] = c >= 0 ? static_cast<std::uint64_t>(c) % q
                          : neg_mod(static_cast<std::uint64_t>(-c) % q, q);
        }
    }
    return out;
}

RnsPoly uniform_from_seed(const Seed& seed, std::size_t limbs) {
    const auto& ctx = RingContext::instance();
    RnsPoly out(limbs, false);
    for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t q = ctx.modulus(l);
        const std::uint64_t mask = (std::uint64_t{1} << std::bit_width(q)) - 1;
        Prg rng(seed, l);
        std::uint64_t* o = out.limb(l);
        for (std::size_t i = 0; i < kDegree; ++i) {
            std::uint64_t v;
            do {
                v = rng.next_u64() & mask;
            } while (v >= q);
            o[i] = v;
        }
    }
    return out;
}

std::vector<std::int64_t> sample_ternary(Prg& rng) {
    std::vector<std::int64_t> s(kDegree);
    for (auto& c : s) c = static_cast<std::int64_t>(rng.uniform(3)) - 1;
    return s;
}

std::vector<std::int64_t> sample_noise(Prg& rng) {
    static_assert(2 * kNoiseEta <= 64);
    const std::uint64_t mask = (std::uint64_t{1} << kNoiseEta) - 1;
    std::vector<std::int64_t> e(kDegree);
    for (auto& c : e) {
        std::uint64_t r = rng.next_u64();
        c = std::popcount(r & mask) - std::popcount((r >> kNoiseEta) & mask);
    }
    return e;
}

}  // namespace p2pir::rlwe
