#include "p2pir/rlwe/ntt.hpp"

#include "p2pir/common/errors.hpp"
#include "p2pir/rlwe/modarith.hpp"

#include "kernels.hpp"

#ifdef P2PIR_KERNELS_AVX512
#define P2PIR_NTT_AVX512 1
#endif

namespace p2pir::rlwe {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
    std::uint64_t result = 1 % q;
    base %= q;
    while (exp) {
        if (exp & 1) result = mul_mod(result, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q) {
    if (a % q == 0) throw InvalidArgument("inverse of zero");
    return pow_mod(a, q - 2, q);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::size_t bit_reverse(std::size_t x, std::size_t bits) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

std::uint64_t primitive_root_of_unity(std::uint64_t q, std::uint64_t generator, std::uint64_t order) {
    if ((q - 1) % order != 0) throw InvalidArgument("order does not divide q - 1");
    std::uint64_t root = pow_mod(generator, (q - 1) / order, q);
    if (pow_mod(root, order / 2, q) != q - 1) throw InvalidArgument("not a primitive root");
    return root;
}

bool ntt_vectorized() {
#ifdef P2PIR_NTT_AVX512
    return true;
#else
    return false;
#endif
}

NttTables::NttTables(std::uint64_t q, std::size_t log_n, std::uint64_t psi)
    : q_(q), n_(std::size_t{1} << log_n), log_n_(log_n), psi_(psi) {
    if (q >= (std::uint64_t{1} << 62)) throw InvalidArgument("modulus too large for lazy NTT");
    if (log_n < 4) throw InvalidArgument("ring degree too small");
    roots_.resize(n_);
    roots_shoup_.resize(n_);
    inv_roots_.resize(n_);
    inv_roots_shoup_.resize(n_);
    std::uint64_t psi_inv = inv_mod(psi, q);
    std::uint64_t p = 1, pi = 1;
    std::vector<std::uint64_t> pow(n_), ipow(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        pow[i] = p;
        ipow[i] = pi;
        p = mul_mod(p, psi, q);
        pi = mul_mod(pi, psi_inv, q);
    }
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = bit_reverse(i, log_n_);
        roots_[i] = pow[r];
        roots_shoup_[i] = shoup(roots_[i], q);
        inv_roots_[i] = ipow[r];
        inv_roots_shoup_[i] = shoup(inv_roots_[i], q);
    }
    n_inv_ = inv_mod(n_ % q, q);
    n_inv_shoup_ = shoup(n_inv_, q);
    for (std::size_t s = 0; s < 3; ++s) {
        const std::size_t t = std::size_t{1} << s;
        const std::size_t m = n_ / (2 * t);
        for (auto* v : {&small_fwd_[s], &small_fwd_shoup_[s], &small_inv_[s], &small_inv_shoup_[s]})
            v->resize(n_ / 2);
        for (std::size_t k = 0; k < n_ / 2; ++k) {
            small_fwd_[s][k] = roots_[m + k / t];
            small_fwd_shoup_[s][k] = roots_shoup_[m + k / t];
            small_inv_[s][k] = inv_roots_[m + k / t];
            small_inv_shoup_[s][k] = inv_roots_shoup_[m + k / t];
        }
    }
}

#ifdef P2PIR_NTT_AVX512

namespace {

using kernels::reduce_once;

inline __m512i mul_shoup_lazy(__m512i x, __m512i w, __m512i ws, __m512i q) {
    return kernels::mul_shoup_lazy(x, w, ws, q);
}

struct Shuffle {
    __m512i x_idx, y_idx, lo_idx, hi_idx;
};

// Lane shuffles splitting 16 consecutive elements into the x and y halves
// of eight butterflies with stride t (t = 1, 2, 4), and back.
Shuffle make_shuffle(std::size_t t) {
    alignas(64) long long xi[8], yi[8], lo[8], hi[8];
    int back[16];
    for (int l = 0; l < 8; ++l) {
        int group = l / static_cast<int>(t), j = l % static_cast<int>(t);
        int xp = 2 * group * static_cast<int>(t) + j;
        int yp = xp + static_cast<int>(t);
        xi[l] = xp;
        yi[l] = yp;
        back[xp] = l;
        back[yp] = 8 + l;
    }
    for (int p = 0; p < 8; ++p) {
        lo[p] = back[p];
        hi[p] = back[8 + p];
    }
    return {_mm512_load_si512(xi), _mm512_load_si512(yi), _mm512_load_si512(lo),
            _mm512_load_si512(hi)};
}

const Shuffle& shuffle_for(std::size_t stage) {
    static const Shuffle shuffles[3] = {make_shuffle(1), make_shuffle(2), make_shuffle(4)};
    return shuffles[stage];
}

}  // namespace

void NttTables::forward(std::uint64_t* a) const {
    const __m512i vq = _mm512_set1_epi64(static_cast<long long>(q_));
    const __m512i v2q = _mm512_set1_epi64(static_cast<long long>(2 * q_));
    std::size_t t = n_;
    for (std::size_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        if (t >= 8) {
            for (std::size_t i = 0; i < m; ++i) {
                const __m512i w = _mm512_set1_epi64(static_cast<long long>(roots_[m + i]));
                const __m512i ws = _mm512_set1_epi64(static_cast<long long>(roots_shoup_[m + i]));
                std::uint64_t* x = a + 2 * i * t;
                std::uint64_t* y = x + t;
                for (std::size_t j = 0; j < t; j += 8) {
                    __m512i u = reduce_once(_mm512_loadu_si512(x + j), v2q);
                    __m512i v = mul_shoup_lazy(_mm512_loadu_si512(y + j), w, ws, vq);
                    _mm512_storeu_si512(x + j, _mm512_add_epi64(u, v));
                    _mm512_storeu_si512(y + j, _mm512_sub_epi64(_mm512_add_epi64(u, v2q), v));
                }
            }
            continue;
        }
        const std::size_t s = t == 4 ? 2 : t == 2 ? 1 : 0;
        const Shuffle& sh = shuffle_for(s);
        const std::uint64_t* tw = small_fwd_[s].data();
        const std::uint64_t* tws = small_fwd_shoup_[s].data();
        for (std::size_t k = 0; k < n_ / 2; k += 8) {
            std::uint64_t* e = a + 2 * k;
            __m512i lo = _mm512_loadu_si512(e), hi = _mm512_loadu_si512(e + 8);
            __m512i u = reduce_once(_mm512_permutex2var_epi64(lo, sh.x_idx, hi), v2q);
            __m512i y = _mm512_permutex2var_epi64(lo, sh.y_idx, hi);
            __m512i v = mul_shoup_lazy(y, _mm512_loadu_si512(tw + k), _mm512_loadu_si512(tws + k), vq);
            __m512i nx = _mm512_add_epi64(u, v);
            __m512i ny = _mm512_sub_epi64(_mm512_add_epi64(u, v2q), v);
            _mm512_storeu_si512(e, _mm512_permutex2var_epi64(nx, sh.lo_idx, ny));
            _mm512_storeu_si512(e + 8, _mm512_permutex2var_epi64(nx, sh.hi_idx, ny));
        }
    }
    for (std::size_t i = 0; i < n_; i += 8) {
        __m512i v = _mm512_loadu_si512(a + i);
        v = reduce_once(reduce_once(v, v2q), vq);
        _mm512_storeu_si512(a + i, v);
    }
}

void NttTables::inverse(std::uint64_t* a) const {
    const __m512i vq = _mm512_set1_epi64(static_cast<long long>(q_));
    const __m512i v2q = _mm512_set1_epi64(static_cast<long long>(2 * q_));
    std::size_t t = 1;
    for (std::size_t m = n_ >> 1; m >= 1; m >>= 1) {
        if (t >= 8) {
            for (std::size_t i = 0; i < m; ++i) {
                const __m512i w = _mm512_set1_epi64(static_cast<long long>(inv_roots_[m + i]));
                const __m512i ws = _mm512_set1_epi64(static_cast<long long>(inv_roots_shoup_[m + i]));
                std::uint64_t* x = a + 2 * i * t;
                std::uint64_t* y = x + t;
                for (std::size_t j = 0; j < t; j += 8) {
                    __m512i u = _mm512_loadu_si512(x + j), v = _mm512_loadu_si512(y + j);
                    _mm512_storeu_si512(x + j, reduce_once(_mm512_add_epi64(u, v), v2q));
                    __m512i d = _mm512_sub_epi64(_mm512_add_epi64(u, v2q), v);
                    _mm512_storeu_si512(y + j, mul_shoup_lazy(d, w, ws, vq));
                }
            }
        } else {
            const std::size_t s = t == 4 ? 2 : t == 2 ? 1 : 0;
            const Shuffle& sh = shuffle_for(s);
            const std::uint64_t* tw = small_inv_[s].data();
            const std::uint64_t* tws = small_inv_shoup_[s].data();
            for (std::size_t k = 0; k < n_ / 2; k += 8) {
                std::uint64_t* e = a + 2 * k;
                __m512i lo = _mm512_loadu_si512(e), hi = _mm512_loadu_si512(e + 8);
                __m512i u = _mm512_permutex2var_epi64(lo, sh.x_idx, hi);
                __m512i v = _mm512_permutex2var_epi64(lo, sh.y_idx, hi);
                __m512i nx = reduce_once(_mm512_add_epi64(u, v), v2q);
                __m512i d = _mm512_sub_epi64(_mm512_add_epi64(u, v2q), v);
                __m512i ny = mul_shoup_lazy(d, _mm512_loadu_si512(tw + k), _mm512_loadu_si512(tws + k), vq);
                _mm512_storeu_si512(e, _mm512_permutex2var_epi64(nx, sh.lo_idx, ny));
                _mm512_storeu_si512(e + 8, _mm512_permutex2var_epi64(nx, sh.hi_idx, ny));
            }
        }
        t <<= 1;
    }
    const __m512i ni = _mm512_set1_epi64(static_cast<long long>(n_inv_));
    const __m512i nis = _mm512_set1_epi64(static_cast<long long>(n_inv_shoup_));
    for (std::size_t i = 0; i < n_; i += 8) {
        __m512i v = mul_shoup_lazy(_mm512_loadu_si512(a + i), ni, nis, vq);
        _mm512_storeu_si512(a + i, reduce_once(v, vq));
    }
}

#else

void NttTables::forward(std::uint64_t* a) const {
    const std::uint64_t q = q_, two_q = 2 * q_;
    std::size_t t = n_;
    for (std::size_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint64_t w = roots_[m + i], ws = roots_shoup_[m + i];
            std::uint64_t* __restrict x = a + 2 * i * t;
            std::uint64_t* __restrict y = x + t;
            for (std::size_t j = 0; j < t; ++j) {
                std::uint64_t u = x[j];
                if (u >= two_q) u -= two_q;
                std::uint64_t v = mul_shoup_lazy(y[j], w, ws, q);
                x[j] = u + v;
                y[j] = u + two_q - v;
            }
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        std::uint64_t v = a[i];
        if (v >= two_q) v -= two_q;
        if (v >= q) v -= q;
        a[i] = v;
    }
}

void NttTables::inverse(std::uint64_t* a) const {
    const std::uint64_t q = q_, two_q = 2 * q_;
    std::size_t t = 1;
    for (std::size_t m = n_ >> 1; m >= 1; m >>= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint64_t w = inv_roots_[m + i], ws = inv_roots_shoup_[m + i];
            std::uint64_t* __restrict x = a + 2 * i * t;
            std::uint64_t* __restrict y = x + t;
            for (std::size_t j = 0; j < t; ++j) {
                std::uint64_t u = x[j], v = y[j];
                std::uint64_t s = u + v;
                if (s >= two_q) s -= two_q;
                x[j] = s;
                y[j] = mul_shoup_lazy(u + two_q - v, w, ws, q);
            }
        }
        t <<= 1;
    }
    for (std::size_t i = 0; i < n_; ++i) a[i] = mul_shoup(a[i], n_inv_, n_inv_shoup_, q);
}

#endif

}  // namespace p2pir::rlwe
