#include "nemto/nets.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "nemto/errors.hpp"
#include "nemto/rng.hpp"

namespace nemto {

namespace {
constexpr int kSdfHidden = 256;
constexpr int kSdfDepth = 8;
constexpr int kSdfSkipLayer = 4;
constexpr double kSdfBeta = 100.0;
constexpr int kRbnHidden = 256;
constexpr int kRbnDepth = 4;
}  // namespace

SdfNetwork::SdfNetwork() {
    mlp = Mlp::make(enc.output_dim(), std::vector<int>(kSdfDepth, kSdfHidden), 1, kSdfBeta,
                    {kSdfSkipLayer});
}

void SdfNetwork::init_geometric(uint64_t seed, double radius) {
    Rng rng(seed);
    const int in0 = enc.output_dim();
    const int raw_dims = enc.include_input ? enc.input_dim : 0;
    const int L = int(mlp.layers.size());
    for (int l = 0; l < L; ++l) {
        MlpLayer& ly = mlp.layers[l];
        std::fill(ly.biases.begin(), ly.biases.end(), 0.0);
        if (l == L - 1) {
            // Output layer: positive mean weights and bias -radius give a
            // field close to |x| - radius at initialization.
            const double mean = std::sqrt(M_PI) / std::sqrt(double(ly.in));
            for (double& w : ly.weights) w = rng.normal(mean, 1e-4);
            ly.biases[0] = -radius;
            continue;
        }
        const double std = std::sqrt(2.0 / double(ly.out));
        for (double& w : ly.weights) w = rng.normal(0.0, std);
        if (l == 0) {
            // Keep only the raw-coordinate columns active at init.
            for (int o = 0; o < ly.out; ++o)
                for (int i = raw_dims; i < ly.in; ++i) ly.weights[size_t(o) * ly.in + i] = 0.0;
        } else if (mlp.is_skip(l)) {
            // Same for the encoded part of the appended skip input.
            const int appended_start = ly.in - in0;
            for (int o = 0; o < ly.out; ++o)
                for (int i = appended_start + raw_dims; i < ly.in; ++i)
                    ly.weights[size_t(o) * ly.in + i] = 0.0;
        }
    }
}

double SdfNetwork::eval(const Vec3& x) const {
    std::vector<double> encoded(enc.output_dim());
    enc.encode(&x.x, encoded.data());
    MlpTape tape;
    mlp_forward(mlp, encoded.data(), 1, tape);
    return tape.output[0];
}

void SdfNetwork::eval_batch(std::span<const Vec3> xs, std::span<double> out) const {
    const int batch = int(xs.size());
    if (batch == 0) return;
    const int dim = enc.output_dim();
    std::vector<double> encoded(size_t(batch) * dim);
    for (int b = 0; b < batch; ++b) enc.encode(&xs[b].x, encoded.data() + size_t(b) * dim);
    MlpTape tape;
    mlp_forward(mlp, encoded.data(), batch, tape);
    std::copy(tape.output.begin(), tape.output.end(), out.begin());
}

SdfNetwork::ValueGrad SdfNetwork::eval_with_gradient(const Vec3& x) const {
    std::vector<double> encoded(enc.output_dim());
    enc.encode(&x.x, encoded.data());
    MlpTape tape;
    mlp_forward(mlp, encoded.data(), 1, tape);

    const double ybar = 1.0;
    std::vector<double> enc_bar(enc.output_dim(), 0.0);
    mlp_backward(mlp, tape, &ybar, nullptr, enc_bar.data());

    ValueGrad vg;
    vg.value = tape.output[0];
    double raw_bar[3] = {0.0, 0.0, 0.0};
    enc.encode_vjp_acc(&x.x, enc_bar.data(), raw_bar);
    vg.grad = {raw_bar[0], raw_bar[1], raw_bar[2]};
    return vg;
}

LearnedSdf::LearnedSdf(std::shared_ptr<SdfNetwork> net, const Aabb& box)
    : net_(std::move(net)) {
    bbox_ = box;
}

RayBendingNetwork::RayBendingNetwork() {
    mlp = Mlp::make(input_dim(), std::vector<int>(kRbnDepth, kRbnHidden), 4, 1.0, {});
}

void RayBendingNetwork::init(uint64_t seed) {
    Rng rng(seed);
    const int L = int(mlp.layers.size());
    for (int l = 0; l < L; ++l) {
        MlpLayer& ly = mlp.layers[l];
        std::fill(ly.biases.begin(), ly.biases.end(), 0.0);
        // He-style fan-in scaling for the hidden stack, small output head so
        // the initial eta sits near glass (1 + softplus(0)).
        const double std = l == L - 1 ? 0.01 : std::sqrt(2.0 / double(ly.in));
        for (double& w : ly.weights) w = rng.normal(0.0, std);
    }
}

void RayBendingNetwork::encode_input(const Vec3& omega_i, const Vec3& x, const Vec3& n,
                                     double* out) const {
    enc_dir.encode(&omega_i.x, out);
    out += enc_dir.output_dim();
    enc_pos.encode(&x.x, out);
    out += enc_pos.output_dim();
    out[0] = n.x;
    out[1] = n.y;
    out[2] = n.z;
}

RbnOutput RayBendingNetwork::heads(const double raw[4]) {
    const Vec3 v{raw[0], raw[1], raw[2]};
    const double len = norm(v);
    if (len < 1e-8)
        throw DegenerateDirection("rbn: raw direction norm below 1e-8");
    RbnOutput out;
    out.omega_t = v / len;
    out.eta_t = 1.0 + stable_softplus(raw[3]);
    return out;
}

void RayBendingNetwork::heads_backward(const double raw[4], const Vec3& omega_t_bar,
                                       double eta_bar, double raw_bar[4]) {
    const Vec3 v{raw[0], raw[1], raw[2]};
    const double len = norm(v);
    const Vec3 u = v / len;
    // d(normalize)/dv = (I - u u^T) / |v|: the radial component projects out.
    const Vec3 g = (omega_t_bar - dot(omega_t_bar, u) * u) / len;
    raw_bar[0] = g.x;
    raw_bar[1] = g.y;
    raw_bar[2] = g.z;
    raw_bar[3] = eta_bar * stable_sigmoid(raw[3]);
}

RbnOutput RayBendingNetwork::eval(const Vec3& omega_i, const Vec3& x, const Vec3& n) const {
    std::vector<double> in(input_dim());
    encode_input(omega_i, x, n, in.data());
    MlpTape tape;
    mlp_forward(mlp, in.data(), 1, tape);
    return heads(tape.output.data());
}

// ---------------------------------------------------------------------------
// Checkpoint I/O
// ---------------------------------------------------------------------------

namespace {

constexpr uint32_t kCheckpointVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_bytes(std::FILE* f, const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw IoError("checkpoint: short write");
}

void read_bytes(std::FILE* f, void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n) throw UnexpectedEof("checkpoint: truncated file");
}

void write_u32(std::FILE* f, uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    write_bytes(f, b, 4);
}

uint32_t read_u32(std::FILE* f) {
    uint8_t b[4];
    read_bytes(f, b, 4);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void write_u64(std::FILE* f, uint64_t v) {
    write_u32(f, uint32_t(v));
    write_u32(f, uint32_t(v >> 32));
}

uint64_t read_u64(std::FILE* f) {
    const uint64_t lo = read_u32(f);
    const uint64_t hi = read_u32(f);
    return lo | hi << 32;
}

void write_f64(std::FILE* f, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(f, bits);
}

double read_f64(std::FILE* f) {
    const uint64_t bits = read_u64(f);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_f64_array(std::FILE* f, const double* p, size_t n) {
    for (size_t i = 0; i < n; ++i) write_f64(f, p[i]);
}

void read_f64_array(std::FILE* f, double* p, size_t n) {
    for (size_t i = 0; i < n; ++i) p[i] = read_f64(f);
}

void write_network(std::FILE* f, const char tag[4], const Mlp& mlp, bool has_adam,
                   const AdamState& adam) {
    write_bytes(f, tag, 4);
    write_u32(f, uint32_t(mlp.layers.size()));
    for (const MlpLayer& ly : mlp.layers) {
        write_u32(f, uint32_t(ly.in));
        write_u32(f, uint32_t(ly.out));
        write_u32(f, ly.softplus ? 1 : 0);
    }
    write_f64(f, mlp.beta);
    write_u32(f, uint32_t(mlp.skips.size()));
    for (int s : mlp.skips) write_u32(f, uint32_t(s));
    for (const MlpLayer& ly : mlp.layers) {
        write_f64_array(f, ly.weights.data(), ly.weights.size());
        write_f64_array(f, ly.biases.data(), ly.biases.size());
    }
    write_u32(f, has_adam ? 1 : 0);
    if (has_adam) {
        write_u64(f, adam.step);
        write_f64(f, adam.lr);
        write_f64(f, adam.beta1);
        write_f64(f, adam.beta2);
        write_f64(f, adam.eps);
        write_f64_array(f, adam.m.data(), adam.m.size());
        write_f64_array(f, adam.v.data(), adam.v.size());
    }
}

void read_network(std::FILE* f, const char expect_tag[4], Mlp& mlp, bool& has_adam,
                  AdamState& adam) {
    char tag[4];
    read_bytes(f, tag, 4);
    if (std::memcmp(tag, expect_tag, 4) != 0)
        throw CheckpointMismatch("checkpoint: unexpected network tag");
    const uint32_t n_layers = read_u32(f);
    if (n_layers != mlp.layers.size())
        throw CheckpointMismatch("checkpoint: layer count mismatch");
    for (MlpLayer& ly : mlp.layers) {
        const uint32_t in = read_u32(f);
        const uint32_t out = read_u32(f);
        const uint32_t softplus = read_u32(f);
        if (int(in) != ly.in || int(out) != ly.out || (softplus != 0) != ly.softplus)
            throw CheckpointMismatch("checkpoint: layer shape mismatch");
    }
    const double beta = read_f64(f);
    if (beta != mlp.beta) throw CheckpointMismatch("checkpoint: activation mismatch");
    const uint32_t n_skips = read_u32(f);
    if (n_skips != mlp.skips.size()) throw CheckpointMismatch("checkpoint: skip mismatch");
    for (uint32_t i = 0; i < n_skips; ++i)
        if (int(read_u32(f)) != mlp.skips[i])
            throw CheckpointMismatch("checkpoint: skip mismatch");
    for (MlpLayer& ly : mlp.layers) {
        read_f64_array(f, ly.weights.data(), ly.weights.size());
        read_f64_array(f, ly.biases.data(), ly.biases.size());
    }
    has_adam = read_u32(f) != 0;
    if (has_adam) {
        adam.init(mlp.param_count());
        adam.step = read_u64(f);
        adam.lr = read_f64(f);
        adam.beta1 = read_f64(f);
        adam.beta2 = read_f64(f);
        adam.eps = read_f64(f);
        read_f64_array(f, adam.m.data(), adam.m.size());
        read_f64_array(f, adam.v.data(), adam.v.size());
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("checkpoint: cannot write " + path);
    write_bytes(f.get(), "NMTO", 4);
    write_u32(f.get(), kCheckpointVersion);
    write_u32(f.get(), (ckpt.sdf ? 1u : 0u) | (ckpt.rbn ? 2u : 0u));
    write_f64(f.get(), ckpt.bbox.lo.x);
    write_f64(f.get(), ckpt.bbox.lo.y);
    write_f64(f.get(), ckpt.bbox.lo.z);
    write_f64(f.get(), ckpt.bbox.hi.x);
    write_f64(f.get(), ckpt.bbox.hi.y);
    write_f64(f.get(), ckpt.bbox.hi.z);
    if (ckpt.sdf) write_network(f.get(), "SDF\0", ckpt.sdf->mlp, ckpt.has_sdf_adam, ckpt.sdf_adam);
    if (ckpt.rbn) write_network(f.get(), "RBN\0", ckpt.rbn->mlp, ckpt.has_rbn_adam, ckpt.rbn_adam);
}

Checkpoint load_checkpoint(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("checkpoint: cannot open " + path);
    char magic[4];
    read_bytes(f.get(), magic, 4);
    if (std::memcmp(magic, "NMTO", 4) != 0)
        throw CheckpointMismatch("checkpoint: bad magic in " + path);
    const uint32_t version = read_u32(f.get());
    if (version != kCheckpointVersion)
        throw CheckpointMismatch("checkpoint: unsupported version " + std::to_string(version));
    const uint32_t present = read_u32(f.get());

    Checkpoint ckpt;
    ckpt.bbox.lo.x = read_f64(f.get());
    ckpt.bbox.lo.y = read_f64(f.get());
    ckpt.bbox.lo.z = read_f64(f.get());
    ckpt.bbox.hi.x = read_f64(f.get());
    ckpt.bbox.hi.y = read_f64(f.get());
    ckpt.bbox.hi.z = read_f64(f.get());
    if (present & 1u) {
        ckpt.sdf = std::make_shared<SdfNetwork>();
        read_network(f.get(), "SDF\0", ckpt.sdf->mlp, ckpt.has_sdf_adam, ckpt.sdf_adam);
    }
    if (present & 2u) {
        ckpt.rbn = std::make_shared<RayBendingNetwork>();
        read_network(f.get(), "RBN\0", ckpt.rbn->mlp, ckpt.has_rbn_adam, ckpt.rbn_adam);
    }
    return ckpt;
}

}  // namespace nemto
