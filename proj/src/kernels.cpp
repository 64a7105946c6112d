#include "nemto/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nemto::kernels {

namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double* y, double alpha, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scalar(double* y, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += x[i];
}

void matmul_xwt_scalar(double* Y, const double* X, const double* W, const double* b,
                       size_t bs, size_t out, size_t in) {
    for (size_t s = 0; s < bs; ++s) {
        const double* x = X + s * in;
        double* y = Y + s * out;
        for (size_t o = 0; o < out; ++o) {
            double r = dot_scalar(x, W + o * in, in);
            y[o] = b ? r + b[o] : r;
        }
    }
}

void matmul_xw_acc_scalar(double* Xh, const double* Yh, const double* W,
                          size_t bs, size_t out, size_t in) {
    for (size_t s = 0; s < bs; ++s) {
        double* xh = Xh + s * in;
        const double* yh = Yh + s * out;
        for (size_t o = 0; o < out; ++o) axpy_scalar(xh, yh[o], W + o * in, in);
    }
}

void weight_grad_acc_scalar(double* Wh, double* bh, const double* Yh, const double* X,
                            size_t bs, size_t out, size_t in) {
    for (size_t o = 0; o < out; ++o) {
        double* wh = Wh + o * in;
        double bacc = 0.0;
        for (size_t s = 0; s < bs; ++s) {
            const double g = Yh[s * out + o];
            axpy_scalar(wh, g, X + s * in, in);
            bacc += g;
        }
        if (bh) bh[o] += bacc;
    }
}

void adam_update_scalar(double* p, double* m, double* v, const double* g, size_t n,
                        double lr, double b1, double b2, double eps, double bc1, double bc2) {
    for (size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

const Kernels kScalar = {
    "scalar",        dot_scalar,           axpy_scalar,
    add_scalar,      matmul_xwt_scalar,    matmul_xw_acc_scalar,
    weight_grad_acc_scalar, adam_update_scalar,
};

const Kernels& pick_active() {
    const char* forced = std::getenv("NEMTO_KERNELS");
    const Kernels* vec = avx2();
    if (forced) {
        if (std::strcmp(forced, "scalar") == 0) return kScalar;
        if (std::strcmp(forced, "avx2") == 0) {
            if (vec) return *vec;
            std::fprintf(stderr, "nemto: NEMTO_KERNELS=avx2 requested but CPU lacks AVX2; using scalar\n");
            return kScalar;
        }
        std::fprintf(stderr, "nemto: unknown NEMTO_KERNELS value '%s'; using auto\n", forced);
    }
    return vec ? *vec : kScalar;
}

}  // namespace

const Kernels& scalar() { return kScalar; }

const Kernels& active() {
    static const Kernels& k = pick_active();
    return k;
}

}  // namespace nemto::kernels
