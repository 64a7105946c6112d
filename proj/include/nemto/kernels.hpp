#pragma once

#include <cstddef>

namespace nemto::kernels {

/// Dense double-precision kernels behind the MLP and optimizer hot loops.
///
/// Matrices are row-major. In the batched entry points each sample is a row,
/// so a forward pass is Y = X * W^T + b with W laid out [out x in].
///
/// Contract shared by all implementations: for a fixed (sample, output) pair
/// the accumulation order over the inner dimension is the same regardless of
/// batch size, so evaluating one sample alone or inside a batch produces
/// bit-identical results for a given implementation.
struct Kernels {
    const char* name;

    double (*dot)(const double* a, const double* b, size_t n);

    /// y += alpha * x
    void (*axpy)(double* y, double alpha, const double* x, size_t n);

    /// y += x
    void (*add)(double* y, const double* x, size_t n);

    /// Y[bs x out] = X[bs x in] * W^T + b. Pass b = nullptr for no bias.
    void (*matmul_xwt)(double* Y, const double* X, const double* W, const double* b,
                       size_t bs, size_t out, size_t in);

    /// Xh[bs x in] += Yh[bs x out] * W. Backward of matmul_xwt w.r.t. the input.
    void (*matmul_xw_acc)(double* Xh, const double* Yh, const double* W,
                          size_t bs, size_t out, size_t in);

    /// Wh[out x in] += Yh^T * X and bh[out] += column sums of Yh.
    /// Backward of matmul_xwt w.r.t. the parameters. bh may be nullptr.
    void (*weight_grad_acc)(double* Wh, double* bh, const double* Yh, const double* X,
                            size_t bs, size_t out, size_t in);

    /// Fused Adam update over a flat parameter block:
    ///   m = b1*m + (1-b1)*g; v = b2*v + (1-b2)*g^2;
    ///   p -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
    /// with bc1, bc2 the bias-correction denominators for the current step.
    void (*adam_update)(double* p, double* m, double* v, const double* g, size_t n,
                        double lr, double b1, double b2, double eps, double bc1, double bc2);
};

/// Portable reference implementation.
const Kernels& scalar();

/// AVX2+FMA implementation, or nullptr when unsupported by the CPU.
const Kernels* avx2();

/// Implementation selected at startup: AVX2 when the CPU supports it, else
/// scalar. NEMTO_KERNELS=scalar|avx2 overrides the choice (avx2 falls back to
/// scalar with a warning when unsupported).
const Kernels& active();

}  // namespace nemto::kernels
