#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nemto/kernels.hpp"

namespace nemto {

/// Adam with bias correction. Deterministic: same parameters, gradients and
/// state produce bitwise identical updates.
struct AdamState {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    void init(size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        step = 0;
    }

    void update(double* params, const double* grads, size_t n) {
        step += 1;
        const double bc1 = 1.0 - std::pow(beta1, double(step));
        const double bc2 = 1.0 - std::pow(beta2, double(step));
        kernels::active().adam_update(params, m.data(), v.data(), grads, n, lr, beta1, beta2,
                                      eps, bc1, bc2);
    }
};

}  // namespace nemto
