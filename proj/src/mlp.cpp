#include "nemto/mlp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>

#include "nemto/kernels.hpp"

namespace nemto {

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

bool Mlp::is_skip(int l) const { return std::find(skips.begin(), skips.end(), l) != skips.end(); }

size_t Mlp::param_count() const {
    size_t n = 0;
    for (const MlpLayer& ly : layers) n += ly.weights.size() + ly.biases.size();
    return n;
}

void Mlp::get_params(double* flat) const {
    for (const MlpLayer& ly : layers) {
        std::memcpy(flat, ly.weights.data(), ly.weights.size() * sizeof(double));
        flat += ly.weights.size();
        std::memcpy(flat, ly.biases.data(), ly.biases.size() * sizeof(double));
        flat += ly.biases.size();
    }
}

void Mlp::set_params(const double* flat) {
    for (MlpLayer& ly : layers) {
        std::memcpy(ly.weights.data(), flat, ly.weights.size() * sizeof(double));
        flat += ly.weights.size();
        std::memcpy(ly.biases.data(), flat, ly.biases.size() * sizeof(double));
        flat += ly.biases.size();
    }
}

Mlp Mlp::make(int input_dim, const std::vector<int>& hidden, int output_dim,
              double softplus_beta, const std::vector<int>& skip_layers) {
    Mlp mlp;
    mlp.beta = softplus_beta;
    mlp.skips = skip_layers;
    int prev = input_dim;
    for (size_t l = 0; l < hidden.size(); ++l) {
        MlpLayer ly;
        ly.in = prev + (mlp.is_skip(int(l)) ? input_dim : 0);
        ly.out = hidden[l];
        ly.softplus = true;
        ly.weights.assign(size_t(ly.in) * ly.out, 0.0);
        ly.biases.assign(ly.out, 0.0);
        mlp.layers.push_back(std::move(ly));
        prev = hidden[l];
    }
    MlpLayer out;
    out.in = prev + (mlp.is_skip(int(hidden.size())) ? input_dim : 0);
    out.out = output_dim;
    out.softplus = false;
    out.weights.assign(size_t(out.in) * out.out, 0.0);
    out.biases.assign(out.out, 0.0);
    mlp.layers.push_back(std::move(out));
    return mlp;
}

namespace {

// Concatenate [A | X0] row-wise into dst (batch x (a_dim + x_dim)).
void concat_rows(const double* A, int a_dim, const double* X0, int x_dim, int batch,
                 double* dst) {
    for (int b = 0; b < batch; ++b) {
        std::memcpy(dst + size_t(b) * (a_dim + x_dim), A + size_t(b) * a_dim,
                    a_dim * sizeof(double));
        std::memcpy(dst + size_t(b) * (a_dim + x_dim) + a_dim, X0 + size_t(b) * x_dim,
                    x_dim * sizeof(double));
    }
}

// Parameter offsets of layer l in the flat layout.
void layer_offsets(const Mlp& mlp, int l, size_t& w_off, size_t& b_off) {
    size_t off = 0;
    for (int i = 0; i < l; ++i)
        off += mlp.layers[i].weights.size() + mlp.layers[i].biases.size();
    w_off = off;
    b_off = off + mlp.layers[l].weights.size();
}

}  // namespace

void mlp_forward(const Mlp& mlp, const double* X, int batch, MlpTape& tape) {
    const auto& K = kernels::active();
    const int L = int(mlp.layers.size());
    const int in0 = mlp.input_dim();
    tape.batch = batch;
    tape.inputs.resize(L);
    tape.preact.resize(L);

    std::vector<double> act;  // activation of the previous layer
    for (int l = 0; l < L; ++l) {
        const MlpLayer& ly = mlp.layers[l];
        std::vector<double>& in = tape.inputs[l];
        in.resize(size_t(batch) * ly.in);
        if (l == 0) {
            std::memcpy(in.data(), X, in.size() * sizeof(double));
        } else if (mlp.is_skip(l)) {
            concat_rows(act.data(), mlp.layers[l - 1].out, X, in0, batch, in.data());
        } else {
            std::memcpy(in.data(), act.data(), in.size() * sizeof(double));
        }

        std::vector<double>& z = tape.preact[l];
        z.resize(size_t(batch) * ly.out);
        K.matmul_xwt(z.data(), in.data(), ly.weights.data(), ly.biases.data(), batch, ly.out,
                     ly.in);

        act.resize(z.size());
        if (ly.softplus) {
            const double beta = mlp.beta;
            for (size_t i = 0; i < z.size(); ++i)
                act[i] = stable_softplus(beta * z[i]) / beta;
        } else {
            act = z;
        }
    }
    tape.output = std::move(act);
}

void mlp_backward(const Mlp& mlp, const MlpTape& tape, const double* Ybar, double* grads,
                  double* Xbar) {
    const auto& K = kernels::active();
    const int L = int(mlp.layers.size());
    const int batch = tape.batch;
    const int in0 = mlp.input_dim();

    std::vector<double> abar(Ybar, Ybar + size_t(batch) * mlp.output_dim());
    std::vector<double> zbar, inbar;
    for (int l = L - 1; l >= 0; --l) {
        const MlpLayer& ly = mlp.layers[l];
        const std::vector<double>& z = tape.preact[l];
        zbar.resize(z.size());
        if (ly.softplus) {
            for (size_t i = 0; i < z.size(); ++i)
                zbar[i] = abar[i] * stable_sigmoid(mlp.beta * z[i]);
        } else {
            zbar = abar;
        }

        if (grads) {
            size_t w_off, b_off;
            layer_offsets(mlp, l, w_off, b_off);
            K.weight_grad_acc(grads + w_off, grads + b_off, zbar.data(),
                              tape.inputs[l].data(), batch, ly.out, ly.in);
        }

        inbar.assign(size_t(batch) * ly.in, 0.0);
        K.matmul_xw_acc(inbar.data(), zbar.data(), ly.weights.data(), batch, ly.out, ly.in);

        if (l == 0) {
            if (Xbar) K.add(Xbar, inbar.data(), inbar.size());
            break;
        }
        const int prev_out = mlp.layers[l - 1].out;
        if (mlp.is_skip(l)) {
            abar.resize(size_t(batch) * prev_out);
            for (int b = 0; b < batch; ++b) {
                std::memcpy(abar.data() + size_t(b) * prev_out,
                            inbar.data() + size_t(b) * ly.in, prev_out * sizeof(double));
                if (Xbar)
                    K.add(Xbar + size_t(b) * in0,
                          inbar.data() + size_t(b) * ly.in + prev_out, in0);
            }
        } else {
            abar = std::move(inbar);
        }
    }
}

void mlp_jvp(const Mlp& mlp, const MlpTape& tape, const double* T0, double* out_tangent) {
    const auto& K = kernels::active();
    const int L = int(mlp.layers.size());
    const int batch = tape.batch;
    const int in0 = mlp.input_dim();

    std::vector<double> t(T0, T0 + size_t(batch) * in0);
    std::vector<double> tin, s;
    for (int l = 0; l < L; ++l) {
        const MlpLayer& ly = mlp.layers[l];
        if (mlp.is_skip(l)) {
            tin.resize(size_t(batch) * ly.in);
            concat_rows(t.data(), mlp.layers[l - 1].out, T0, in0, batch, tin.data());
        } else {
            tin = t;
        }
        s.resize(size_t(batch) * ly.out);
        K.matmul_xwt(s.data(), tin.data(), ly.weights.data(), nullptr, batch, ly.out, ly.in);
        t.resize(s.size());
        if (ly.softplus) {
            const std::vector<double>& z = tape.preact[l];
            for (size_t i = 0; i < s.size(); ++i)
                t[i] = s[i] * stable_sigmoid(mlp.beta * z[i]);
        } else {
            t = s;
        }
    }
    std::memcpy(out_tangent, t.data(), t.size() * sizeof(double));
}

void mlp_jvp_param_backward(const Mlp& mlp, const MlpTape& tape, const double* T0,
                            const double* C, double* grads) {
    const auto& K = kernels::active();
    const int L = int(mlp.layers.size());
    const int batch = tape.batch;
    const int in0 = mlp.input_dim();

    // Forward tangent sweep, keeping per-layer tangent inputs and products.
    std::vector<std::vector<double>> tin(L), sv(L);
    {
        std::vector<double> t(T0, T0 + size_t(batch) * in0);
        for (int l = 0; l < L; ++l) {
            const MlpLayer& ly = mlp.layers[l];
            if (mlp.is_skip(l)) {
                tin[l].resize(size_t(batch) * ly.in);
                concat_rows(t.data(), mlp.layers[l - 1].out, T0, in0, batch, tin[l].data());
            } else {
                tin[l] = t;
            }
            sv[l].resize(size_t(batch) * ly.out);
            K.matmul_xwt(sv[l].data(), tin[l].data(), ly.weights.data(), nullptr, batch,
                         ly.out, ly.in);
            t.resize(sv[l].size());
            if (ly.softplus) {
                const std::vector<double>& z = tape.preact[l];
                for (size_t i = 0; i < t.size(); ++i)
                    t[i] = sv[l][i] * stable_sigmoid(mlp.beta * z[i]);
            } else {
                t = sv[l];
            }
        }
    }

    // Reverse sweep over the joint (primal, tangent) computation.
    // that: adjoint of the activated tangent T_l; ahat: adjoint of the primal
    // activation A_l (nonzero below the top because sigmoid'(z) couples them).
    std::vector<double> that(C, C + size_t(batch) * mlp.output_dim());
    std::vector<double> ahat(size_t(batch) * mlp.output_dim(), 0.0);
    std::vector<double> shat, zhat, tinhat, inhat;
    for (int l = L - 1; l >= 0; --l) {
        const MlpLayer& ly = mlp.layers[l];
        const std::vector<double>& z = tape.preact[l];
        shat.resize(z.size());
        zhat.resize(z.size());
        if (ly.softplus) {
            const double beta = mlp.beta;
            for (size_t i = 0; i < z.size(); ++i) {
                const double sg = stable_sigmoid(beta * z[i]);
                // T = sigmoid(beta z) . S  and  A = softplus_beta(z)
                shat[i] = that[i] * sg;
                zhat[i] = that[i] * sv[l][i] * beta * sg * (1.0 - sg) + ahat[i] * sg;
            }
        } else {
            shat = that;
            zhat = ahat;
        }

        size_t w_off, b_off;
        layer_offsets(mlp, l, w_off, b_off);
        // S = Tin W^T contributes Shat^T Tin; Z = In W^T + b contributes Zhat^T In.
        K.weight_grad_acc(grads + w_off, nullptr, shat.data(), tin[l].data(), batch, ly.out,
                          ly.in);
        K.weight_grad_acc(grads + w_off, grads + b_off, zhat.data(), tape.inputs[l].data(),
                          batch, ly.out, ly.in);

        if (l == 0) break;
        tinhat.assign(size_t(batch) * ly.in, 0.0);
        inhat.assign(size_t(batch) * ly.in, 0.0);
        K.matmul_xw_acc(tinhat.data(), shat.data(), ly.weights.data(), batch, ly.out, ly.in);
        K.matmul_xw_acc(inhat.data(), zhat.data(), ly.weights.data(), batch, ly.out, ly.in);

        const int prev_out = mlp.layers[l - 1].out;
        that.resize(size_t(batch) * prev_out);
        ahat.resize(size_t(batch) * prev_out);
        if (mlp.is_skip(l)) {
            // T0 and X are constants here; their cotangent parts are dropped.
            for (int b = 0; b < batch; ++b) {
                std::memcpy(that.data() + size_t(b) * prev_out,
                            tinhat.data() + size_t(b) * ly.in, prev_out * sizeof(double));
                std::memcpy(ahat.data() + size_t(b) * prev_out,
                            inhat.data() + size_t(b) * ly.in, prev_out * sizeof(double));
            }
        } else {
            that = std::move(tinhat);
            ahat = std::move(inhat);
        }
    }
}

}  // namespace nemto
