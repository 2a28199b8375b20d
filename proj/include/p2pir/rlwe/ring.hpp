#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "p2pir/common/prg.hpp"
#include "p2pir/rlwe/ntt.hpp"
#include "p2pir/rlwe/params.hpp"

namespace p2pir::rlwe {

// Limb 0 is the data prime, limb 1 the special prime.
inline constexpr std::size_t kMaxLimbs = 2;

class RingContext {
public:
    static const RingContext& instance();

    std::uint64_t modulus(std::size_t limb) const { return ntt_[limb].modulus(); }
    const NttTables& ntt(std::size_t limb) const { return ntt_[limb]; }

    // Slot permutation realizing p(X) -> p(X^g) on forward-transformed
    // polynomials: out[j] = in[map[j]].
    const std::vector<std::uint32_t>& automorphism_map(std::uint32_t g) const;

private:
    RingContext();
    std::vector<NttTables> ntt_;
    mutable std::mutex mu_;
    mutable std::map<std::uint32_t, std::vector<std::uint32_t>> maps_;
};

// Residue polynomial with `limbs` RNS components of kDegree coefficients each.
struct RnsPoly {
    std::size_t limbs = 0;
    bool ntt_form = false;
    std::vector<std::uint64_t> data;

    RnsPoly() = default;
    RnsPoly(std::size_t limbs_, bool ntt) : limbs(limbs_), ntt_form(ntt), data(limbs_ * kDegree, 0) {}

    std::uint64_t* limb(std::size_t i) { return data.data() + i * kDegree; }
    const std::uint64_t* limb(std::size_t i) const { return data.data() + i * kDegree; }

    bool operator==(const RnsPoly&) const = default;
};

void to_ntt(RnsPoly& p);
void from_ntt(RnsPoly& p);

void add_inplace(RnsPoly& a, const RnsPoly& b);
void sub_inplace(RnsPoly& a, const RnsPoly& b);
void negate_inplace(RnsPoly& a);
// Pointwise product; both operands in forward-transformed form.
void mul_pointwise_inplace(RnsPoly& a, const RnsPoly& b);
// Applies p(X) -> p(X^g), in whichever domain `p` currently is.
RnsPoly apply_automorphism(const RnsPoly& p, std::uint32_t g);

// Small signed coefficients reduced into each limb.
RnsPoly from_signed(std::span<const std::int64_t> coeffs, std::size_t limbs);
// Uniform polynomial, limb i drawn from Prg(seed, i).
RnsPoly uniform_from_seed(const Seed& seed, std::size_t limbs);
std::vector<std::int64_t> sample_ternary(Prg& rng);
std::vector<std::int64_t> sample_noise(Prg& rng);

}  // namespace p2pir::rlwe
