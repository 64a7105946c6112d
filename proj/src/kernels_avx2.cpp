// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and only ever executed after a runtime cpuid check.

#include "nemto/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define NEMTO_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define NEMTO_HAVE_AVX2_BUILD 0
#endif

#include <cmath>

namespace nemto::kernels {

#if NEMTO_HAVE_AVX2_BUILD

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc);
    double r = hsum(acc);
    for (; k < n; ++k) r += a[k] * b[k];
    return r;
}

void axpy_avx2(double* y, double alpha, const double* x, size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d yv = _mm256_loadu_pd(y + k);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + k), yv);
        _mm256_storeu_pd(y + k, yv);
    }
    for (; k < n; ++k) y[k] += alpha * x[k];
}

void add_avx2(double* y, const double* x, size_t n) {
    size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), _mm256_loadu_pd(x + k)));
    for (; k < n; ++k) y[k] += x[k];
}

// Four samples against one weight row at a time; the per-(sample, output)
// accumulation sequence matches dot_avx2 exactly, keeping batch evaluation
// bit-identical to one-at-a-time evaluation.
void matmul_xwt_avx2(double* Y, const double* X, const double* W, const double* b,
                     size_t bs, size_t out, size_t in) {
    size_t s = 0;
    for (; s + 4 <= bs; s += 4) {
        const double* x0 = X + (s + 0) * in;
        const double* x1 = X + (s + 1) * in;
        const double* x2 = X + (s + 2) * in;
        const double* x3 = X + (s + 3) * in;
        for (size_t o = 0; o < out; ++o) {
            const double* w = W + o * in;
            __m256d a0 = _mm256_setzero_pd();
            __m256d a1 = _mm256_setzero_pd();
            __m256d a2 = _mm256_setzero_pd();
            __m256d a3 = _mm256_setzero_pd();
            size_t k = 0;
            for (; k + 4 <= in; k += 4) {
                const __m256d wv = _mm256_loadu_pd(w + k);
                a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x0 + k), wv, a0);
                a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x1 + k), wv, a1);
                a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x2 + k), wv, a2);
                a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x3 + k), wv, a3);
            }
            double r0 = hsum(a0), r1 = hsum(a1), r2 = hsum(a2), r3 = hsum(a3);
            for (; k < in; ++k) {
                r0 += x0[k] * w[k];
                r1 += x1[k] * w[k];
                r2 += x2[k] * w[k];
                r3 += x3[k] * w[k];
            }
            const double base = b ? b[o] : 0.0;
            Y[(s + 0) * out + o] = r0 + base;
            Y[(s + 1) * out + o] = r1 + base;
            Y[(s + 2) * out + o] = r2 + base;
            Y[(s + 3) * out + o] = r3 + base;
        }
    }
    for (; s < bs; ++s) {
        const double* x = X + s * in;
        double* y = Y + s * out;
        for (size_t o = 0; o < out; ++o) {
            double r = dot_avx2(x, W + o * in, in);
            y[o] = b ? r + b[o] : r;
        }
    }
}

void matmul_xw_acc_avx2(double* Xh, const double* Yh, const double* W,
                        size_t bs, size_t out, size_t in) {
    for (size_t s = 0; s < bs; ++s) {
        double* xh = Xh + s * in;
        const double* yh = Yh + s * out;
        for (size_t o = 0; o < out; ++o) axpy_avx2(xh, yh[o], W + o * in, in);
    }
}

void weight_grad_acc_avx2(double* Wh, double* bh, const double* Yh, const double* X,
                          size_t bs, size_t out, size_t in) {
    for (size_t o = 0; o < out; ++o) {
        double* wh = Wh + o * in;
        double bacc = 0.0;
        for (size_t s = 0; s < bs; ++s) {
            const double g = Yh[s * out + o];
            axpy_avx2(wh, g, X + s * in, in);
            bacc += g;
        }
        if (bh) bh[o] += bacc;
    }
}

void adam_update_avx2(double* p, double* m, double* v, const double* g, size_t n,
                      double lr, double b1, double b2, double eps, double bc1, double bc2) {
    const __m256d b1v = _mm256_set1_pd(b1);
    const __m256d b2v = _mm256_set1_pd(b2);
    const __m256d ob1 = _mm256_set1_pd(1.0 - b1);
    const __m256d ob2 = _mm256_set1_pd(1.0 - b2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d ibc1 = _mm256_set1_pd(1.0 / bc1);
    const __m256d ibc2 = _mm256_set1_pd(1.0 / bc2);
    size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d gv = _mm256_loadu_pd(g + k);
        __m256d mv = _mm256_loadu_pd(m + k);
        __m256d vv = _mm256_loadu_pd(v + k);
        mv = _mm256_add_pd(_mm256_mul_pd(b1v, mv), _mm256_mul_pd(ob1, gv));
        vv = _mm256_add_pd(_mm256_mul_pd(b2v, vv), _mm256_mul_pd(ob2, _mm256_mul_pd(gv, gv)));
        _mm256_storeu_pd(m + k, mv);
        _mm256_storeu_pd(v + k, vv);
        const __m256d mhat = _mm256_mul_pd(mv, ibc1);
        const __m256d vhat = _mm256_mul_pd(vv, ibc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        __m256d pv = _mm256_loadu_pd(p + k);
        pv = _mm256_sub_pd(pv, _mm256_div_pd(_mm256_mul_pd(lrv, mhat), denom));
        _mm256_storeu_pd(p + k, pv);
    }
    for (; k < n; ++k) {
        m[k] = b1 * m[k] + (1.0 - b1) * g[k];
        v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
        const double mhat = m[k] * (1.0 / bc1);
        const double vhat = v[k] * (1.0 / bc2);
        p[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

const Kernels kAvx2 = {
    "avx2",     dot_avx2,         axpy_avx2,
    add_avx2,   matmul_xwt_avx2,  matmul_xw_acc_avx2,
    weight_grad_acc_avx2, adam_update_avx2,
};

}  // namespace

const Kernels* avx2() {
    static const Kernels* k = []() -> const Kernels* {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
        return nullptr;
    }();
    return k;
}

#else

const Kernels* avx2() { return nullptr; }

#endif

}  // namespace nemto::kernels
