#pragma once

#include <memory>
#include <span>
#include <string>

#include "nemto/adam.hpp"
#include "nemto/encoding.hpp"
#include "nemto/mlp.hpp"
#include "nemto/sdf.hpp"
#include "nemto/vec3.hpp"

namespace nemto {

/// Geometry network: position -> signed distance. 8 hidden layers of 256,
/// softplus(beta=100), encoded input with a skip into layer 4, geometric
/// initialization close to a sphere.
class SdfNetwork {
public:
    SdfNetwork();

    void init_geometric(uint64_t seed, double radius);

    double eval(const Vec3& x) const;
    void eval_batch(std::span<const Vec3> xs, std::span<double> out) const;

    struct ValueGrad {
        double value = 0.0;
        Vec3 grad;
    };
    /// Forward plus the exact input gradient (the network's backward pass,
    /// not finite differences).
    ValueGrad eval_with_gradient(const Vec3& x) const;

    /// Encoded input for external batching.
    void encode(const Vec3& x, double* out) const { enc.encode(&x.x, out); }

    FourierEncoding enc{3, 6, true};
    Mlp mlp;
};

/// SdfField view of a geometry network inside a fixed bounding box.
class LearnedSdf final : public SdfField {
public:
    LearnedSdf(std::shared_ptr<SdfNetwork> net, const Aabb& box);

    double query(const Vec3& x) const override { return net_->eval(x); }
    Vec3 gradient(const Vec3& x) const override { return net_->eval_with_gradient(x).grad; }
    void query_many(std::span<const Vec3> xs, std::span<double> out) const override {
        net_->eval_batch(xs, out);
    }
    // An unconverged network is not a metric SDF; march conservatively.
    double step_relaxation() const override { return 0.9; }

    SdfNetwork& network() { return *net_; }
    const SdfNetwork& network() const { return *net_; }

private:
    std::shared_ptr<SdfNetwork> net_;
};

struct RbnOutput {
    Vec3 omega_t;       // unit exit direction
    double eta_t = 1.0; // predicted index, >= 1 by construction
};

/// Ray bending network: (omega_i, x, n) -> (omega_t, eta_t). Directions are
/// encoded with 6 frequencies, positions with 8; 4 hidden layers of 256.
class RayBendingNetwork {
public:
    RayBendingNetwork();

    void init(uint64_t seed);

    int input_dim() const { return enc_dir.output_dim() + enc_pos.output_dim() + 3; }
    void encode_input(const Vec3& omega_i, const Vec3& x, const Vec3& n, double* out) const;

    /// Throws DegenerateDirection when the raw direction norm is below 1e-8.
    RbnOutput eval(const Vec3& omega_i, const Vec3& x, const Vec3& n) const;

    /// Head mapping from the 4 raw outputs.
    static RbnOutput heads(const double raw[4]);
    /// Cotangent pullback through the heads (normalization + softplus shift).
    static void heads_backward(const double raw[4], const Vec3& omega_t_bar, double eta_bar,
                               double raw_bar[4]);

    FourierEncoding enc_dir{3, 6, true};
    FourierEncoding enc_pos{3, 8, true};
    Mlp mlp;
};

/// Versioned binary checkpoint: magic "NMTO", u32 version, per-network layer
/// tables, little-endian float64 parameter arrays, optional Adam state.
struct Checkpoint {
    Aabb bbox;
    std::shared_ptr<SdfNetwork> sdf;         // null when geometry was analytic/frozen
    std::shared_ptr<RayBendingNetwork> rbn;  // null in geometry-only checkpoints
    bool has_sdf_adam = false;
    bool has_rbn_adam = false;
    AdamState sdf_adam;
    AdamState rbn_adam;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);  // throws CheckpointMismatch

}  // namespace nemto
