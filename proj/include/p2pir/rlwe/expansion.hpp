#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/rlwe/rlwe.hpp"

namespace p2pir::rlwe {

enum class KeyVariant : std::uint8_t {
    LogN = 1,   // one key per expansion level
    Three = 2,  // {3, 5, 1167}
    Two = 3,    // {3, 1173}
};

const char* variant_name(KeyVariant v);

// Base exponents carried by a key set.
std::vector<std::uint32_t> generator_exponents(KeyVariant variant, unsigned levels);

// Exponent 1 + N/2^level used by the expansion at a given level.
std::uint32_t level_target(unsigned level);

// Shortest products of generators reaching each element of Z*_{2N}.
class GeneratorReach {
public:
    explicit GeneratorReach(std::span<const std::uint32_t> generators);

    bool reachable(std::uint32_t g) const;
    // Generators (in application order) whose product is g; empty for g = 1.
    std::vector<std::uint32_t> chain(std::uint32_t g) const;
    int distance(std::uint32_t g) const;
    std::size_t reached_count() const { return reached_; }

private:
    std::vector<int> dist_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> via_;
    std::size_t reached_ = 0;
};

// Key-switching key from s(X^g) back to s, in wire form.
struct AutomorphismKey {
    std::uint32_t exponent = 0;
    Seed seed{};
    RnsPoly b;  // both limbs, coefficient form; the random half expands from `seed`
};

struct RlweKeyMaterial {
    KeyVariant variant = KeyVariant::LogN;
    unsigned levels = 0;
    std::vector<AutomorphismKey> keys;
};

RlweKeyMaterial generate_keys(const SecretKey& sk, KeyVariant variant, unsigned levels, Prg& rng);
Bytes serialize(const RlweKeyMaterial& km);
RlweKeyMaterial deserialize_key_material(ByteSpan data);

// Server-side key set with transformed keys and the per-level exponent plan.
class ExpansionKeys {
public:
    explicit ExpansionKeys(const RlweKeyMaterial& km);

    KeyVariant variant() const { return variant_; }
    unsigned levels() const { return levels_; }
    const GeneratorReach& reach() const { return reach_; }

    // Input and output: data-prime ciphertext in transformed form.
    Ciphertext substitute(const Ciphertext& ct, std::uint32_t g) const;
    // One key switch with a key present in the set.
    Ciphertext substitute_base(const Ciphertext& ct, std::uint32_t g) const;

    // Exponent used at `level`: the cheapest element acting like
    // 1 + N/2^level on polynomials supported on multiples of 2^level.
    std::uint32_t level_exponent(unsigned level) const;
    // Base substitutions performed by a full expansion with `levels` levels.
    std::size_t base_substitutions(unsigned levels) const;

private:
    struct PreparedKey {
        std::uint32_t exponent;
        RnsPoly k0, k1;  // transformed
        RnsPoly k0_shoup, k1_shoup;
    };
    const PreparedKey& key_for(std::uint32_t g) const;

    KeyVariant variant_;
    unsigned levels_;
    std::vector<PreparedKey> keys_;
    GeneratorReach reach_;
    std::vector<std::uint32_t> level_exponents_;
    std::uint64_t p_inv_ = 0, p_inv_shoup_ = 0;
};

// Per-level exponents chosen by the class rule (see ExpansionKeys).
std::vector<std::uint32_t> plan_level_exponents(const GeneratorReach& reach, unsigned levels);

// Receives (subtree, output index, ciphertext) for each expansion output.
using ExpandVisitor = std::function<void(std::size_t, std::size_t, const Ciphertext&)>;

// Depth-first expansion. The tree is cut into independent subtrees that run
// on up to `threads` workers; outputs of one subtree are visited by a single
// worker, so per-subtree state needs no locking. Returns the subtree count.
// `limit` skips outputs with index >= limit.
std::size_t expand_depth_first(const ExpansionKeys& keys, const Ciphertext& ct, unsigned levels,
                               unsigned threads, const ExpandVisitor& visit,
                               std::size_t limit = SIZE_MAX, bool literal_exponents = false);

// Number of subtrees expand_depth_first uses for a thread count.
std::size_t expansion_subtrees(unsigned levels, unsigned threads);

// Splits one ciphertext into 2^levels ciphertexts, output u holding
// 2^levels times the coefficient of X^u. Input: data prime, transformed.
std::vector<Ciphertext> oblivious_expand(const ExpansionKeys& keys, const Ciphertext& ct,
                                         unsigned levels, unsigned threads = 1,
                                         bool literal_exponents = false);

}  // namespace p2pir::rlwe
