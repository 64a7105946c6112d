#pragma once

#include <cmath>
#include <vector>

namespace nemto {

/// Fourier-feature positional encoding:
///   [p,] sin(2^0 pi p), cos(2^0 pi p), ..., sin(2^(L-1) pi p), cos(2^(L-1) pi p)
/// applied elementwise, frequency-major.
struct FourierEncoding {
    int input_dim = 3;
    int num_frequencies = 0;
    bool include_input = true;

    int output_dim() const {
        return input_dim * (include_input ? 1 : 0) + 2 * num_frequencies * input_dim;
    }

    void encode(const double* p, double* out) const {
        int o = 0;
        if (include_input)
            for (int j = 0; j < input_dim; ++j) out[o++] = p[j];
        for (int k = 0; k < num_frequencies; ++k) {
            const double freq = std::ldexp(M_PI, k);  // 2^k * pi
            for (int j = 0; j < input_dim; ++j) out[o++] = std::sin(freq * p[j]);
            for (int j = 0; j < input_dim; ++j) out[o++] = std::cos(freq * p[j]);
        }
    }

    /// Tangent of the encoding: J(p) * t.
    void encode_jvp(const double* p, const double* t, double* out) const {
        int o = 0;
        if (include_input)
            for (int j = 0; j < input_dim; ++j) out[o++] = t[j];
        for (int k = 0; k < num_frequencies; ++k) {
            const double freq = std::ldexp(M_PI, k);
            for (int j = 0; j < input_dim; ++j) out[o++] = freq * std::cos(freq * p[j]) * t[j];
            for (int j = 0; j < input_dim; ++j) out[o++] = -freq * std::sin(freq * p[j]) * t[j];
        }
    }

    /// Pullback of an encoded cotangent: J(p)^T * ebar, accumulated into pbar.
    void encode_vjp_acc(const double* p, const double* ebar, double* pbar) const {
        int o = 0;
        if (include_input)
            for (int j = 0; j < input_dim; ++j) pbar[j] += ebar[o++];
        for (int k = 0; k < num_frequencies; ++k) {
            const double freq = std::ldexp(M_PI, k);
            for (int j = 0; j < input_dim; ++j) pbar[j] += freq * std::cos(freq * p[j]) * ebar[o++];
            for (int j = 0; j < input_dim; ++j) pbar[j] += -freq * std::sin(freq * p[j]) * ebar[o++];
        }
    }

    std::vector<double> encode(const std::vector<double>& p) const {
        std::vector<double> out(output_dim());
        encode(p.data(), out.data());
        return out;
    }
};

}  // namespace nemto
