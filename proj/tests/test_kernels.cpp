#include <doctest.h>

#include <cmath>
#include <string_view>
#include <vector>

#include "nemto/kernels.hpp"
#include "nemto/rng.hpp"

using namespace nemto;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal(0.0, scale);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1.0});
        CHECK(std::fabs(a[i] - b[i]) <= rel * scale);
    }
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree on random problems") {
    const kernels::Kernels* vec = kernels::avx2();
    if (!vec) return;  // CPU without AVX2: dispatch already covered by scalar
    const kernels::Kernels& ref = kernels::scalar();

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t in = 1 + rng.uniform_index(300);
        const size_t out = 1 + rng.uniform_index(64);
        const size_t bs = 1 + rng.uniform_index(9);

        const auto X = random_vec(rng, bs * in);
        const auto W = random_vec(rng, out * in);
        const auto B = random_vec(rng, out);

        CHECK(ref.dot(X.data(), X.data(), in) ==
              doctest::Approx(vec->dot(X.data(), X.data(), in)).epsilon(1e-13));

        std::vector<double> y0(bs * out), y1(bs * out);
        ref.matmul_xwt(y0.data(), X.data(), W.data(), B.data(), bs, out, in);
        vec->matmul_xwt(y1.data(), X.data(), W.data(), B.data(), bs, out, in);
        check_close(y0, y1, 1e-12);

        std::vector<double> xh0(bs * in, 0.1), xh1(bs * in, 0.1);
        ref.matmul_xw_acc(xh0.data(), y0.data(), W.data(), bs, out, in);
        vec->matmul_xw_acc(xh1.data(), y1.data(), W.data(), bs, out, in);
        check_close(xh0, xh1, 1e-11);

        std::vector<double> wh0(out * in, 0.0), wh1(out * in, 0.0);
        std::vector<double> bh0(out, 0.0), bh1(out, 0.0);
        ref.weight_grad_acc(wh0.data(), bh0.data(), y0.data(), X.data(), bs, out, in);
        vec->weight_grad_acc(wh1.data(), bh1.data(), y1.data(), X.data(), bs, out, in);
        check_close(wh0, wh1, 1e-11);
        check_close(bh0, bh1, 1e-11);

        auto p0 = random_vec(rng, in);
        auto p1 = p0;
        auto m0 = random_vec(rng, in, 0.01);
        auto m1 = m0;
        std::vector<double> v0(in, 0.5), v1(in, 0.5);
        const auto g = random_vec(rng, in);
        ref.adam_update(p0.data(), m0.data(), v0.data(), g.data(), in, 1e-3, 0.9, 0.999,
                        1e-8, 0.1, 0.001);
        vec->adam_update(p1.data(), m1.data(), v1.data(), g.data(), in, 1e-3, 0.9, 0.999,
                         1e-8, 0.1, 0.001);
        check_close(p0, p1, 1e-12);
        check_close(m0, m1, 1e-12);
        check_close(v0, v1, 1e-12);
    }
}

TEST_CASE("batched evaluation is bit-identical to one sample at a time") {
    const kernels::Kernels& K = kernels::active();
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const size_t in = 1 + rng.uniform_index(130);
        const size_t out = 1 + rng.uniform_index(40);
        const size_t bs = 1 + rng.uniform_index(11);
        const auto X = random_vec(rng, bs * in);
        const auto W = random_vec(rng, out * in);
        const auto B = random_vec(rng, out);

        std::vector<double> batched(bs * out);
        K.matmul_xwt(batched.data(), X.data(), W.data(), B.data(), bs, out, in);
        for (size_t s = 0; s < bs; ++s) {
            std::vector<double> single(out);
            K.matmul_xwt(single.data(), X.data() + s * in, W.data(), B.data(), 1, out, in);
            for (size_t o = 0; o < out; ++o) CHECK(single[o] == batched[s * out + o]);
        }
    }
}

TEST_CASE("active kernel dispatch picks a usable implementation") {
    const kernels::Kernels& K = kernels::active();
    const double a[3] = {1.0, 2.0, 3.0};
    CHECK(K.dot(a, a, 3) == doctest::Approx(14.0));
    CHECK((std::string_view(K.name) == "avx2" || std::string_view(K.name) == "scalar"));
}
