#pragma once

// Element-wise kernels over ring-degree arrays, vectorized with AVX-512
// when available.

#include <cstddef>
#include <cstdint>

#include "p2pir/rlwe/modarith.hpp"

#if defined(__AVX512F__) && defined(__AVX512DQ__)
#include <immintrin.h>
#define P2PIR_KERNELS_AVX512 1
#endif

namespace p2pir::rlwe::kernels {

using u64 = std::uint64_t;

#ifdef P2PIR_KERNELS_AVX512

inline __m512i mulhi64(__m512i a, __m512i b) {
    const __m512i lo32 = _mm512_set1_epi64(0xffffffffULL);
    __m512i ah = _mm512_srli_epi64(a, 32), bh = _mm512_srli_epi64(b, 32);
    __m512i ll = _mm512_mul_epu32(a, b);
    __m512i lh = _mm512_mul_epu32(a, bh);
    __m512i hl = _mm512_mul_epu32(ah, b);
    __m512i hh = _mm512_mul_epu32(ah, bh);
    __m512i mid = _mm512_add_epi64(_mm512_srli_epi64(ll, 32), _mm512_and_si512(lh, lo32));
    mid = _mm512_add_epi64(mid, _mm512_and_si512(hl, lo32));
    __m512i hi = _mm512_add_epi64(hh, _mm512_srli_epi64(lh, 32));
    hi = _mm512_add_epi64(hi, _mm512_srli_epi64(hl, 32));
    return _mm512_add_epi64(hi, _mm512_srli_epi64(mid, 32));
}

inline __m512i mul_shoup_lazy(__m512i x, __m512i w, __m512i ws, __m512i q) {
    __m512i hi = mulhi64(x, ws);
    return _mm512_sub_epi64(_mm512_mullo_epi64(x, w), _mm512_mullo_epi64(hi, q));
}

inline __m512i reduce_once(__m512i x, __m512i m) {
    return _mm512_min_epu64(x, _mm512_sub_epi64(x, m));
}

inline __m512i set1(u64 v) { return _mm512_set1_epi64(static_cast<long long>(v)); }
inline __m512i load(const u64* p) { return _mm512_loadu_si512(p); }
inline void store(u64* p, __m512i v) { _mm512_storeu_si512(p, v); }

#endif

// out[j] = in[map[j]]
inline void gather(const u64* in, const std::uint32_t* map, u64* out, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    for (std::size_t j = 0; j < n; j += 8) {
        __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(map + j));
        store(out + j, _mm512_i32gather_epi64(idx, in, 8));
    }
#else
    for (std::size_t j = 0; j < n; ++j) out[j] = in[map[j]];
#endif
}

// Centered lift from modulus `from` to a larger modulus `to`.
inline void lift_up(u64* x, u64 from, u64 to, std::size_t n) {
    const u64 half = from / 2, diff = to - from;
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vh = set1(half), vd = set1(diff);
    for (std::size_t j = 0; j < n; j += 8) {
        __m512i v = load(x + j);
        __mmask8 big = _mm512_cmpgt_epu64_mask(v, vh);
        store(x + j, _mm512_mask_add_epi64(v, big, v, vd));
    }
#else
    for (std::size_t j = 0; j < n; ++j)
        if (x[j] > half) x[j] += diff;
#endif
}

// Centered lift from modulus `from` to a smaller modulus `to` with from < 2 * to.
inline void lift_down(u64* x, u64 from, u64 to, std::size_t n) {
    const u64 half = from / 2, diff = from - to;
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vh = set1(half), vd = set1(diff);
    for (std::size_t j = 0; j < n; j += 8) {
        __m512i v = load(x + j);
        __mmask8 big = _mm512_cmpgt_epu64_mask(v, vh);
        store(x + j, _mm512_mask_sub_epi64(v, big, v, vd));
    }
#else
    for (std::size_t j = 0; j < n; ++j)
        if (x[j] > half) x[j] -= diff;
#endif
}

// out = x * w mod q (w has Shoup companions ws), fully reduced.
inline void mul_shoup(const u64* x, const u64* w, const u64* ws, u64 q, u64* out, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q);
    for (std::size_t j = 0; j < n; j += 8)
        store(out + j, reduce_once(mul_shoup_lazy(load(x + j), load(w + j), load(ws + j), vq), vq));
#else
    for (std::size_t j = 0; j < n; ++j) out[j] = rlwe::mul_shoup(x[j], w[j], ws[j], q);
#endif
}

// out = x * c mod q for a constant c.
inline void mul_const(const u64* x, u64 c, u64 cs, u64 q, u64* out, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q), vc = set1(c), vcs = set1(cs);
    for (std::size_t j = 0; j < n; j += 8)
        store(out + j, reduce_once(mul_shoup_lazy(load(x + j), vc, vcs, vq), vq));
#else
    for (std::size_t j = 0; j < n; ++j) out[j] = rlwe::mul_shoup(x[j], c, cs, q);
#endif
}

// acc += (x - y) * c mod q, all inputs reduced.
inline void add_scaled_diff(u64* acc, const u64* x, const u64* y, u64 c, u64 cs, u64 q, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q), vc = set1(c), vcs = set1(cs);
    for (std::size_t j = 0; j < n; j += 8) {
        __m512i d = _mm512_sub_epi64(_mm512_add_epi64(load(x + j), vq), load(y + j));
        __m512i r = reduce_once(mul_shoup_lazy(d, vc, vcs, vq), vq);
        store(acc + j, reduce_once(_mm512_add_epi64(load(acc + j), r), vq));
    }
#else
    for (std::size_t j = 0; j < n; ++j)
        acc[j] = add_mod(acc[j], rlwe::mul_shoup(sub_mod(x[j], y[j], q), c, cs, q), q);
#endif
}

// out = (x - y) * c mod q.
inline void scaled_diff(const u64* x, const u64* y, u64 c, u64 cs, u64 q, u64* out, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q), vc = set1(c), vcs = set1(cs);
    for (std::size_t j = 0; j < n; j += 8) {
        __m512i d = _mm512_sub_epi64(_mm512_add_epi64(load(x + j), vq), load(y + j));
        store(out + j, reduce_once(mul_shoup_lazy(d, vc, vcs, vq), vq));
    }
#else
    for (std::size_t j = 0; j < n; ++j) out[j] = rlwe::mul_shoup(sub_mod(x[j], y[j], q), c, cs, q);
#endif
}

inline void add(u64* x, const u64* y, u64 q, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q);
    for (std::size_t j = 0; j < n; j += 8) store(x + j, reduce_once(_mm512_add_epi64(load(x + j), load(y + j)), vq));
#else
    for (std::size_t j = 0; j < n; ++j) x[j] = add_mod(x[j], y[j], q);
#endif
}

inline void sub(u64* x, const u64* y, u64 q, std::size_t n) {
#ifdef P2PIR_KERNELS_AVX512
    const __m512i vq = set1(q);
    for (std::size_t j = 0; j < n; j += 8)
        store(x + j, reduce_once(_mm512_sub_epi64(_mm512_add_epi64(load(x + j), vq), load(y + j)), vq));
#else
    for (std::size_t j = 0; j < n; ++j) x[j] = sub_mod(x[j], y[j], q);
#endif
}

}  // namespace p2pir::rlwe::kernels
