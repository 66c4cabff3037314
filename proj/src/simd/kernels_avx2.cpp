#include "szego/simd.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#define SZEGO_HAVE_X86 1
#include <immintrin.h>
#else
#define SZEGO_HAVE_X86 0
#endif

namespace szego::simd {

#if SZEGO_HAVE_X86
namespace {

#define SZEGO_AVX2 __attribute__((target("avx2,fma")))

// Each __m256d holds two complex numbers (re0, im0, re1, im1).

SZEGO_AVX2 inline __m256d modulus_sq_pairs(__m256d v) {
    const __m256d sq = _mm256_mul_pd(v, v);
    return _mm256_hadd_pd(sq, sq);  // (|v0|^2, |v0|^2, |v1|^2, |v1|^2)
}

SZEGO_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

SZEGO_AVX2 void cubic_inplace_avx2(double* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d x = _mm256_loadu_pd(v + 2 * i);
        _mm256_storeu_pd(v + 2 * i, _mm256_mul_pd(modulus_sq_pairs(x), x));
    }
    for (; i < n; ++i) {
        const double re = v[2 * i], im = v[2 * i + 1];
        const double m = re * re + im * im;
        v[2 * i] = m * re;
        v[2 * i + 1] = m * im;
    }
}

SZEGO_AVX2 void scaled_add_avx2(double* out, const double* u, double a, const double* k, std::size_t n) {
    const std::size_t len = 2 * n;
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(k + i), _mm256_loadu_pd(u + i));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < len; ++i) out[i] = u[i] + a * k[i];
}

SZEGO_AVX2 void scale_avx2(double* v, double s, std::size_t n) {
    const std::size_t len = 2 * n;
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) _mm256_storeu_pd(v + i, _mm256_mul_pd(sv, _mm256_loadu_pd(v + i)));
    for (; i < len; ++i) v[i] *= s;
}

SZEGO_AVX2 void mul_avx2(double* v, const double* w, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d x = _mm256_loadu_pd(v + 2 * i);
        const __m256d y = _mm256_loadu_pd(w + 2 * i);
        const __m256d yr = _mm256_movedup_pd(y);           // (c, c)
        const __m256d yi = _mm256_permute_pd(y, 0xF);      // (d, d)
        const __m256d xs = _mm256_permute_pd(x, 0x5);      // (b, a)
        // (a c - b d, b c + a d)
        _mm256_storeu_pd(v + 2 * i, _mm256_fmaddsub_pd(x, yr, _mm256_mul_pd(xs, yi)));
    }
    for (; i < n; ++i) {
        const double a = v[2 * i], b = v[2 * i + 1];
        const double c = w[2 * i], d = w[2 * i + 1];
        v[2 * i] = a * c - b * d;
        v[2 * i + 1] = a * d + b * c;
    }
}

SZEGO_AVX2 double norm_sq_avx2(const double* x, std::size_t n) {
    const std::size_t len = 2 * n;
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= len; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < len; ++i) s += x[i] * x[i];
    return s;
}

SZEGO_AVX2 double weighted_norm_sq_avx2(const double* x, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d a = _mm256_loadu_pd(x + 2 * i);
        const __m128d w2 = _mm_loadu_pd(w + i);
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);  // (w0, w0, w1, w1)
        acc = _mm256_fmadd_pd(ww, _mm256_mul_pd(a, a), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * (x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1]);
    return s;
}

SZEGO_AVX2 void dot_conj_avx2(const double* x, const double* y, std::size_t n, double* out) {
    // re accumulates (xr yr, xi yi); im accumulates (xr yi, xi yr).
    __m256d re0 = _mm256_setzero_pd(), im0 = _mm256_setzero_pd();
    __m256d re1 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a0 = _mm256_loadu_pd(x + 2 * i);
        const __m256d b0 = _mm256_loadu_pd(y + 2 * i);
        const __m256d a1 = _mm256_loadu_pd(x + 2 * i + 4);
        const __m256d b1 = _mm256_loadu_pd(y + 2 * i + 4);
        re0 = _mm256_fmadd_pd(a0, b0, re0);
        im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), im0);
        re1 = _mm256_fmadd_pd(a1, b1, re1);
        im1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0x5), im1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d a0 = _mm256_loadu_pd(x + 2 * i);
        const __m256d b0 = _mm256_loadu_pd(y + 2 * i);
        re0 = _mm256_fmadd_pd(a0, b0, re0);
        im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), im0);
    }
    const __m256d re = _mm256_add_pd(re0, re1);
    const __m256d im = _mm256_add_pd(im0, im1);
    alignas(32) double r[4], m[4];
    _mm256_store_pd(r, re);
    _mm256_store_pd(m, im);
    double sre = r[0] + r[1] + r[2] + r[3];
    double sim = (m[1] - m[0]) + (m[3] - m[2]);
    for (; i < n; ++i) {
        const double xr = x[2 * i], xi = x[2 * i + 1];
        const double yr = y[2 * i], yi = y[2 * i + 1];
        sre += xr * yr + xi * yi;
        sim += xi * yr - xr * yi;
    }
    out[0] = sre;
    out[1] = sim;
}

SZEGO_AVX2 std::size_t threshold_zero_avx2(double* v, double threshold, std::size_t n) {
    const __m256d t2 = _mm256_set1_pd(threshold * threshold);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t zeroed = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d x = _mm256_loadu_pd(v + 2 * i);
        const __m256d m = modulus_sq_pairs(x);
        const __m256d below = _mm256_cmp_pd(m, t2, _CMP_LT_OQ);
        const __m256d counted = _mm256_and_pd(below, _mm256_cmp_pd(m, zero, _CMP_GT_OQ));
        zeroed += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(counted))) / 2;
        _mm256_storeu_pd(v + 2 * i, _mm256_blendv_pd(x, zero, below));
    }
    const double t2s = threshold * threshold;
    for (; i < n; ++i) {
        const double m = v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1];
        if (m < t2s) {
            zeroed += (m > 0.0);
            v[2 * i] = 0.0;
            v[2 * i + 1] = 0.0;
        }
    }
    return zeroed;
}

#undef SZEGO_AVX2

constexpr KernelTable kAvx2{
    cubic_inplace_avx2, scaled_add_avx2,       scale_avx2,    mul_avx2,
    norm_sq_avx2,       weighted_norm_sq_avx2, dot_conj_avx2, threshold_zero_avx2,
};

}  // namespace

bool avx2_available() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable& avx2_kernels() {
    if (!avx2_available()) throw std::runtime_error("AVX2/FMA kernels requested on a CPU without support");
    return kAvx2;
}

#else

bool avx2_available() { return false; }

const KernelTable& avx2_kernels() { throw std::runtime_error("AVX2 kernels not built for this architecture"); }

#endif

}  // namespace szego::simd
