// AVX2+FMA kernels. Complex numbers are interleaved (re,im) pairs, so one
// 256-bit register holds two complex doubles. The complex product uses the
// usual shuffle/fmaddsub decomposition:
//   (ar+i ai)(xr+i xi) = (ar*xr - ai*xi) + i(ar*xi + ai*xr)
// with even lanes carrying real parts and odd lanes imaginary parts.
//
// This file is compiled with -mavx2 -mfma and only dispatched to at runtime
// when the CPU reports both features.

#include "qamp/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <vector>

namespace qamp::kernels {

namespace {

inline __m256d conj_mask()
{
    return _mm256_set_pd(-0.0, 0.0, -0.0, 0.0); // flips imaginary lanes
}

// [a*x0, a*x1] for complex broadcast a held as (ar, ai) vectors
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d v)
{
    __m256d vs = _mm256_permute_pd(v, 0x5); // swap re/im within each pair
    return _mm256_fmaddsub_pd(ar, v, _mm256_mul_pd(ai, vs));
}

void zaxpy_avx2(std::size_t n, cx a, const cx* x, cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    double* ys = reinterpret_cast<double*>(y);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(xs + 2 * i);
        __m256d w = _mm256_loadu_pd(ys + 2 * i);
        _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(w, cmul_broadcast(ar, ai, v)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void zaxpy_conj_avx2(std::size_t n, cx a, const cx* x, cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    double* ys = reinterpret_cast<double*>(y);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const __m256d mask = conj_mask();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_xor_pd(_mm256_loadu_pd(xs + 2 * i), mask);
        __m256d w = _mm256_loadu_pd(ys + 2 * i);
        _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(w, cmul_broadcast(ar, ai, v)));
    }
    for (; i < n; ++i) y[i] += a * std::conj(x[i]);
}

void daxpy_avx2(std::size_t n, double a, const cx* x, cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    double* ys = reinterpret_cast<double*>(y);
    const std::size_t m = 2 * n;
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d v = _mm256_loadu_pd(xs + i);
        __m256d w = _mm256_loadu_pd(ys + i);
        _mm256_storeu_pd(ys + i, _mm256_fmadd_pd(av, v, w));
    }
    for (; i < m; ++i) ys[i] += a * xs[i];
}

void zscale_avx2(std::size_t n, cx a, cx* x)
{
    double* xs = reinterpret_cast<double*>(x);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(xs + 2 * i);
        _mm256_storeu_pd(xs + 2 * i, cmul_broadcast(ar, ai, v));
    }
    for (; i < n; ++i) x[i] *= a;
}

// even lanes: xr*yr + xi*yi, odd lanes: xr*yi - xi*yr  (conjugated product)
inline __m256d cmulc_acc(__m256d u, __m256d v)
{
    __m256d u_re = _mm256_shuffle_pd(u, u, 0x0);
    __m256d u_im = _mm256_shuffle_pd(u, u, 0xF);
    __m256d v_sw = _mm256_permute_pd(v, 0x5);
    return _mm256_fmsubadd_pd(u_re, v, _mm256_mul_pd(u_im, v_sw));
}

// plain elementwise complex product
inline __m256d cmulu_acc(__m256d u, __m256d v)
{
    __m256d u_re = _mm256_shuffle_pd(u, u, 0x0);
    __m256d u_im = _mm256_shuffle_pd(u, u, 0xF);
    __m256d v_sw = _mm256_permute_pd(v, 0x5);
    return _mm256_fmaddsub_pd(u_re, v, _mm256_mul_pd(u_im, v_sw));
}

inline cx hsum_complex(__m256d acc)
{
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s = _mm_add_pd(lo, hi);
    alignas(16) double out[2];
    _mm_store_pd(out, s);
    return {out[0], out[1]};
}

cx zdotc_avx2(std::size_t n, const cx* x, const cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    const double* ys = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d u = _mm256_loadu_pd(xs + 2 * i);
        __m256d v = _mm256_loadu_pd(ys + 2 * i);
        acc = _mm256_add_pd(acc, cmulc_acc(u, v));
    }
    cx s = hsum_complex(acc);
    for (; i < n; ++i) {
        s += cx(x[i].real() * y[i].real() + x[i].imag() * y[i].imag(),
                x[i].real() * y[i].imag() - x[i].imag() * y[i].real());
    }
    return s;
}

cx zdotu_avx2(std::size_t n, const cx* x, const cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    const double* ys = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d u = _mm256_loadu_pd(xs + 2 * i);
        __m256d v = _mm256_loadu_pd(ys + 2 * i);
        acc = _mm256_add_pd(acc, cmulu_acc(u, v));
    }
    cx s = hsum_complex(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double znorm2_avx2(std::size_t n, const cx* x)
{
    const double* xs = reinterpret_cast<const double*>(x);
    const std::size_t m = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d v = _mm256_loadu_pd(xs + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
    for (; i < m; ++i) s += xs[i] * xs[i];
    return s;
}

void hermite_grid_avx2(std::size_t np, const double* x, int nmax, double* out)
{
    constexpr double pi_quarter = 0.7511255444649425;
    // recurrence coefficients are shared across points
    std::vector<double> c1(static_cast<std::size_t>(nmax) + 1), c2(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n < nmax; ++n) {
        c1[n] = std::sqrt(2.0 / (n + 1));
        c2[n] = std::sqrt(double(n) / (n + 1));
    }
    std::size_t j = 0;
    for (; j + 4 <= np; j += 4) {
        __m256d xv = _mm256_loadu_pd(x + j);
        alignas(32) double g[4];
        for (int k = 0; k < 4; ++k)
            g[k] = pi_quarter * std::exp(-0.5 * x[j + k] * x[j + k]);
        __m256d cur = _mm256_load_pd(g);
        __m256d prev = _mm256_setzero_pd();
        _mm256_storeu_pd(out + j, cur);
        for (int n = 0; n < nmax; ++n) {
            __m256d next = _mm256_fmsub_pd(
                _mm256_mul_pd(_mm256_set1_pd(c1[n]), xv), cur,
                _mm256_mul_pd(_mm256_set1_pd(c2[n]), prev));
            prev = cur;
            cur = next;
            _mm256_storeu_pd(out + std::size_t(n + 1) * np + j, cur);
        }
    }
    for (; j < np; ++j) {
        double prev = 0.0;
        double cur = pi_quarter * std::exp(-0.5 * x[j] * x[j]);
        out[j] = cur;
        for (int n = 0; n < nmax; ++n) {
            double next = c1[n] * x[j] * cur - c2[n] * prev;
            prev = cur;
            cur = next;
            out[std::size_t(n + 1) * np + j] = cur;
        }
    }
}

const Backend avx2_table{
    "avx2",
    zaxpy_avx2,
    zaxpy_conj_avx2,
    daxpy_avx2,
    zscale_avx2,
    zdotc_avx2,
    zdotu_avx2,
    znorm2_avx2,
    hermite_grid_avx2,
};

} // namespace

const Backend* avx2_backend()
{
#if defined(__GNUC__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &avx2_table;
#endif
    return nullptr;
}

} // namespace qamp::kernels

#else // no AVX2 in this build

namespace qamp::kernels {
const Backend* avx2_backend() { return nullptr; }
} // namespace qamp::kernels

#endif
