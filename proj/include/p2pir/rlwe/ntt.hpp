#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace p2pir::rlwe {

// Negacyclic NTT over Z_q[X]/(X^n + 1). Forward output is in bit-reversed
// order: slot j holds the evaluation at psi^(2*bitrev(j) + 1).
class NttTables {
public:
    NttTables(std::uint64_t q, std::size_t log_n, std::uint64_t psi);

    void forward(std::uint64_t* a) const;
    void inverse(std::uint64_t* a) const;

    std::uint64_t modulus() const { return q_; }
    std::size_t size() const { return n_; }
    std::uint64_t psi() const { return psi_; }

private:
    std::uint64_t q_;
    std::size_t n_;
    std::size_t log_n_;
    std::uint64_t psi_;
    std::vector<std::uint64_t> roots_, roots_shoup_;
    std::vector<std::uint64_t> inv_roots_, inv_roots_shoup_;
    std::uint64_t n_inv_, n_inv_shoup_;
    // Per-butterfly twiddles for the three stages with stride below 8,
    // indexed [stage][butterfly]; stage s has stride 1 << s.
    std::vector<std::uint64_t> small_fwd_[3], small_fwd_shoup_[3];
    std::vector<std::uint64_t> small_inv_[3], small_inv_shoup_[3];
};

// True when the vectorized transform is compiled in.
bool ntt_vectorized();

std::size_t bit_reverse(std::size_t x, std::size_t bits);

// A primitive 2n-th root of unity mod q from a generator of Z_q^*.
std::uint64_t primitive_root_of_unity(std::uint64_t q, std::uint64_t generator, std::uint64_t order);

}  // namespace p2pir::rlwe
