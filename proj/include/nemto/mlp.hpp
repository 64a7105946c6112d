#pragma once

#include <vector>

namespace nemto {

struct MlpLayer {
    int in = 0;
    int out = 0;
    bool softplus = true;          // false: linear output layer
    std::vector<double> weights;   // out x in, row-major
    std::vector<double> biases;    // out
};

/// Fully connected network with exact tape-based reverse-mode gradients.
/// Layers listed in skips take [previous activation, network input] as input
/// (the widened-input skip convention, so every hidden width stays uniform).
struct Mlp {
    std::vector<MlpLayer> layers;
    std::vector<int> skips;
    double beta = 1.0;  // softplus sharpness

    int input_dim() const { return layers.front().in; }
    int output_dim() const { return layers.back().out; }
    bool is_skip(int l) const;

    size_t param_count() const;
    void get_params(double* flat) const;
    void set_params(const double* flat);

    /// Builds the layer stack: input -> hidden... -> output, hidden layers
    /// softplus, output linear. skip_layers index into the hidden stack.
    static Mlp make(int input_dim, const std::vector<int>& hidden, int output_dim,
                    double softplus_beta, const std::vector<int>& skip_layers = {});
};

/// Everything the reverse passes need: per-layer inputs and pre-activations
/// for one batch (samples are rows).
struct MlpTape {
    int batch = 0;
    std::vector<std::vector<double>> inputs;  // per layer, batch x layer.in
    std::vector<std::vector<double>> preact;  // per layer, batch x layer.out
    std::vector<double> output;               // batch x output_dim
};

void mlp_forward(const Mlp& mlp, const double* X, int batch, MlpTape& tape);

/// Reverse pass from output cotangents Ybar (batch x output_dim).
/// When grads is non-null, parameter gradients accumulate into it (layout of
/// Mlp::get_params). When Xbar is non-null, input cotangents accumulate into
/// it (batch x input_dim).
void mlp_backward(const Mlp& mlp, const MlpTape& tape, const double* Ybar,
                  double* grads, double* Xbar);

/// Forward-mode directional derivative of the outputs along per-sample input
/// tangents T0 (batch x input_dim) -> out_tangent (batch x output_dim).
void mlp_jvp(const Mlp& mlp, const MlpTape& tape, const double* T0, double* out_tangent);

/// Backward-over-forward: accumulates into grads the parameter gradient of
///   sum_{b,o} C[b,o] * jvp(X_b; T0_b)[o]
/// with T0 held constant. This is what second-order losses on the input
/// gradient (eikonal, normal supervision) reduce to.
void mlp_jvp_param_backward(const Mlp& mlp, const MlpTape& tape, const double* T0,
                            const double* C, double* grads);

// Numerically stable scalar pieces shared with the heads.
double stable_softplus(double x);
double stable_sigmoid(double x);

}  // namespace nemto
