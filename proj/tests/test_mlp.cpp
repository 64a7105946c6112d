#include <doctest.h>

#include <cmath>
#include <vector>

#include "nemto/mlp.hpp"
#include "nemto/rng.hpp"

using namespace nemto;

namespace {

Mlp random_mlp(Rng& rng, int in, std::vector<int> hidden, int out, double beta,
               std::vector<int> skips = {}) {
    Mlp mlp = Mlp::make(in, hidden, out, beta, skips);
    for (MlpLayer& ly : mlp.layers) {
        for (double& w : ly.weights) w = rng.normal(0.0, 0.5 / std::sqrt(double(ly.in)));
        for (double& b : ly.biases) b = rng.normal(0.0, 0.1);
    }
    return mlp;
}

std::vector<double> random_input(Rng& rng, size_t n) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

// Straight-line matrix arithmetic reimplementation used as the oracle.
std::vector<double> reference_forward(const Mlp& mlp, const std::vector<double>& x) {
    std::vector<double> a = x;
    const std::vector<double> x0 = x;
    for (size_t l = 0; l < mlp.layers.size(); ++l) {
        const MlpLayer& ly = mlp.layers[l];
        std::vector<double> in = a;
        if (mlp.is_skip(int(l))) in.insert(in.end(), x0.begin(), x0.end());
        std::vector<double> z(ly.out, 0.0);
        for (int o = 0; o < ly.out; ++o) {
            double s = ly.biases[o];
            for (int i = 0; i < ly.in; ++i) s += ly.weights[size_t(o) * ly.in + i] * in[i];
            z[o] = s;
        }
        a.resize(ly.out);
        for (int o = 0; o < ly.out; ++o)
            a[o] = ly.softplus ? std::log1p(std::exp(mlp.beta * z[o])) / mlp.beta : z[o];
    }
    return a;
}

double loss_of(const Mlp& mlp, const std::vector<double>& x, const std::vector<double>& c) {
    const auto y = reference_forward(mlp, x);
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += c[i] * y[i];
    return s;
}

}  // namespace

TEST_CASE("forward edge cases") {
    Mlp zero = Mlp::make(3, {4}, 2, 1.0);
    MlpTape tape;
    const std::vector<double> x{0.3, -0.2, 0.9};
    mlp_forward(zero, x.data(), 1, tape);
    // Zero weights: hidden is softplus(0) = ln 2, output stays zero.
    CHECK(tape.output[0] == 0.0);
    CHECK(tape.output[1] == 0.0);

    Mlp identity = Mlp::make(3, {}, 3, 1.0);
    for (int i = 0; i < 3; ++i) identity.layers[0].weights[i * 3 + i] = 1.0;
    mlp_forward(identity, x.data(), 1, tape);
    CHECK(tape.output == x);
}

TEST_CASE("forward matches the straight-line reference") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Mlp mlp = random_mlp(rng, 5, {16, 16}, 3, 1.0);
        const auto x = random_input(rng, 5);
        MlpTape tape;
        mlp_forward(mlp, x.data(), 1, tape);
        const auto ref = reference_forward(mlp, x);
        for (int i = 0; i < 3; ++i)
            CHECK(tape.output[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("forward with a skip layer matches the reference") {
    Rng rng(6);
    const Mlp mlp = random_mlp(rng, 4, {8, 8, 8}, 2, 2.0, {1});
    const auto x = random_input(rng, 4);
    MlpTape tape;
    mlp_forward(mlp, x.data(), 1, tape);
    const auto ref = reference_forward(mlp, x);
    CHECK(tape.output[0] == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(tape.output[1] == doctest::Approx(ref[1]).epsilon(1e-12));
}

TEST_CASE("zero cotangent produces zero gradients") {
    Rng rng(7);
    const Mlp mlp = random_mlp(rng, 3, {8}, 2, 1.0);
    const auto x = random_input(rng, 3);
    MlpTape tape;
    mlp_forward(mlp, x.data(), 1, tape);
    std::vector<double> grads(mlp.param_count(), 0.0);
    std::vector<double> xbar(3, 0.0);
    const double ybar[2] = {0.0, 0.0};
    mlp_backward(mlp, tape, ybar, grads.data(), xbar.data());
    for (double g : grads) CHECK(g == 0.0);
    for (double g : xbar) CHECK(g == 0.0);
}

TEST_CASE("linear net gradient is the outer product c x^T") {
    Mlp lin = Mlp::make(3, {}, 2, 1.0);
    Rng rng(8);
    for (double& w : lin.layers[0].weights) w = rng.normal();
    const std::vector<double> x{0.5, -1.5, 2.0};
    MlpTape tape;
    mlp_forward(lin, x.data(), 1, tape);
    std::vector<double> grads(lin.param_count(), 0.0);
    const double c[2] = {2.0, -3.0};
    mlp_backward(lin, tape, c, grads.data(), nullptr);
    for (int o = 0; o < 2; ++o)
        for (int i = 0; i < 3; ++i)
            CHECK(grads[o * 3 + i] == doctest::Approx(c[o] * x[i]).epsilon(1e-12));
    CHECK(grads[6] == doctest::Approx(2.0));   // bias takes the raw cotangent
    CHECK(grads[7] == doctest::Approx(-3.0));
}

TEST_CASE("parameter and input gradients match central finite differences") {
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        Mlp mlp = random_mlp(rng, 4, {10, 10, 10}, 2, trial % 2 ? 1.0 : 3.0, {2});
        const auto x = random_input(rng, 4);
        std::vector<double> c{rng.normal(), rng.normal()};

        MlpTape tape;
        mlp_forward(mlp, x.data(), 1, tape);
        std::vector<double> grads(mlp.param_count(), 0.0);
        std::vector<double> xbar(4, 0.0);
        mlp_backward(mlp, tape, c.data(), grads.data(), xbar.data());

        std::vector<double> params(mlp.param_count());
        mlp.get_params(params.data());
        const double h = 1e-5;
        for (size_t k = 0; k < params.size(); k += 7) {  // sampled coordinates
            auto pp = params, pm = params;
            pp[k] += h;
            pm[k] -= h;
            Mlp mp = mlp, mm = mlp;
            mp.set_params(pp.data());
            mm.set_params(pm.data());
            const double fd = (loss_of(mp, x, c) - loss_of(mm, x, c)) / (2 * h);
            CHECK(grads[k] == doctest::Approx(fd).epsilon(1e-4));
        }
        for (int i = 0; i < 4; ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (loss_of(mlp, xp, c) - loss_of(mlp, xm, c)) / (2 * h);
            CHECK(xbar[i] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("jvp matches finite differences along the tangent") {
    Rng rng(10);
    const Mlp mlp = random_mlp(rng, 3, {12, 12}, 2, 1.0, {1});
    const auto x = random_input(rng, 3);
    const auto t = random_input(rng, 3);

    MlpTape tape;
    mlp_forward(mlp, x.data(), 1, tape);
    std::vector<double> tangent(2);
    mlp_jvp(mlp, tape, t.data(), tangent.data());

    const double h = 1e-6;
    std::vector<double> xp(3), xm(3);
    for (int i = 0; i < 3; ++i) {
        xp[i] = x[i] + h * t[i];
        xm[i] = x[i] - h * t[i];
    }
    const auto fp = reference_forward(mlp, xp);
    const auto fm = reference_forward(mlp, xm);
    for (int i = 0; i < 2; ++i)
        CHECK(tangent[i] == doctest::Approx((fp[i] - fm[i]) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("jvp parameter backward matches finite differences of the jvp") {
    Rng rng(11);
    Mlp mlp = random_mlp(rng, 3, {8, 8, 8}, 1, 2.0, {2});
    const auto x = random_input(rng, 3);
    const auto t = random_input(rng, 3);
    const double c = 1.3;

    MlpTape tape;
    mlp_forward(mlp, x.data(), 1, tape);
    std::vector<double> grads(mlp.param_count(), 0.0);
    mlp_jvp_param_backward(mlp, tape, t.data(), &c, grads.data());

    auto scalar = [&](const Mlp& m) {
        MlpTape tp;
        mlp_forward(m, x.data(), 1, tp);
        double tangent = 0.0;
        mlp_jvp(m, tp, t.data(), &tangent);
        return c * tangent;
    };

    std::vector<double> params(mlp.param_count());
    mlp.get_params(params.data());
    const double h = 1e-5;
    for (size_t k = 0; k < params.size(); k += 11) {
        auto pp = params, pm = params;
        pp[k] += h;
        pm[k] -= h;
        Mlp mp = mlp, mm = mlp;
        mp.set_params(pp.data());
        mm.set_params(pm.data());
        const double fd = (scalar(mp) - scalar(mm)) / (2 * h);
        const double tol = std::max(1e-6, 1e-3 * std::fabs(fd));
        CHECK(std::fabs(grads[k] - fd) <= tol);
    }
}

TEST_CASE("batched forward and backward equal per-sample runs") {
    Rng rng(12);
    const Mlp mlp = random_mlp(rng, 4, {16, 16}, 3, 1.0, {1});
    const int batch = 6;
    const auto X = random_input(rng, size_t(batch) * 4);
    const auto Ybar = random_input(rng, size_t(batch) * 3);

    MlpTape batch_tape;
    mlp_forward(mlp, X.data(), batch, batch_tape);
    std::vector<double> batch_grads(mlp.param_count(), 0.0);
    std::vector<double> batch_xbar(size_t(batch) * 4, 0.0);
    mlp_backward(mlp, batch_tape, Ybar.data(), batch_grads.data(), batch_xbar.data());

    std::vector<double> sum_grads(mlp.param_count(), 0.0);
    for (int b = 0; b < batch; ++b) {
        MlpTape tape;
        mlp_forward(mlp, X.data() + b * 4, 1, tape);
        for (int o = 0; o < 3; ++o)
            CHECK(tape.output[o] == batch_tape.output[size_t(b) * 3 + o]);
        std::vector<double> xbar(4, 0.0);
        mlp_backward(mlp, tape, Ybar.data() + b * 3, sum_grads.data(), xbar.data());
        for (int i = 0; i < 4; ++i)
            CHECK(xbar[i] == batch_xbar[size_t(b) * 4 + i]);
    }
    // Gradients sum over the batch; summation order differs, so allow epsilon.
    for (size_t k = 0; k < sum_grads.size(); ++k)
        CHECK(batch_grads[k] == doctest::Approx(sum_grads[k]).epsilon(1e-10));
}
