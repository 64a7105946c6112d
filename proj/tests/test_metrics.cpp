#include <doctest.h>

#include <cmath>

#include "nemto/metrics.hpp"
#include "nemto/rng.hpp"

using namespace nemto;

namespace {

ImageF constant_image(int w, int h, float v) {
    ImageF img(w, h);
    for (float& x : img.data) x = v;
    return img;
}

}  // namespace

TEST_CASE("psnr caps at 99 dB for identical images") {
    const ImageF a = constant_image(16, 16, 0.5f);
    CHECK(psnr(a, a) == 99.0);
}

TEST_CASE("psnr of uniform errors") {
    const ImageF a = constant_image(16, 16, 0.5f);
    const ImageF b = constant_image(16, 16, 0.6f);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));

    const ImageF c = constant_image(16, 16, 0.0f);
    const ImageF d = constant_image(16, 16, 0.5f);
    CHECK(psnr(c, d) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-6));
}

TEST_CASE("psnr respects the evaluation mask") {
    ImageF a = constant_image(8, 8, 0.5f);
    ImageF b = a;
    b.at(0, 0, 0) = 1.0f;  // error outside the mask
    MaskImage mask(8, 8);
    mask.set(4, 4, true);
    CHECK(psnr(a, b, &mask) == 99.0);

    MaskImage empty(8, 8);
    CHECK_THROWS_AS(psnr(a, b, &empty), ZeroPixelMask);
}

TEST_CASE("psnr and ssim are symmetric") {
    Rng rng(3);
    ImageF a(16, 16), b(16, 16);
    for (size_t i = 0; i < a.data.size(); ++i) {
        a.data[i] = float(rng.uniform());
        b.data[i] = float(rng.uniform());
    }
    CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
}

TEST_CASE("ssim of identical images is one") {
    Rng rng(4);
    ImageF a(32, 32);
    for (float& v : a.data) v = float(rng.uniform());
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim of a checkerboard against its negative is negative") {
    ImageF a(32, 32), b(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = (x + y) % 2 ? 1.0f : 0.0f;
                a.at(x, y, c) = v;
                b.at(x, y, c) = 1.0f - v;
            }
    CHECK(ssim(a, b) < 0.0);
}

TEST_CASE("ssim of two constants reduces to the luminance term") {
    const double u = 0.3, w = 0.7;
    const ImageF a = constant_image(16, 16, float(u));
    const ImageF b = constant_image(16, 16, float(w));
    const double c1 = 0.01 * 0.01;
    const double expected = (2 * u * w + c1) / (u * u + w * w + c1);
    CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("ssim rejects images smaller than the window") {
    const ImageF a = constant_image(8, 8, 0.5f);
    CHECK_THROWS_AS(ssim(a, a), ImageTooSmall);
}

TEST_CASE("angular error statistics") {
    const std::vector<Vec3> a{{1, 0, 0}, {0, 1, 0}};
    CHECK(angular_error(a, a).mean_deg == doctest::Approx(0.0));
    CHECK(angular_error(a, a).median_deg == doctest::Approx(0.0));

    const std::vector<Vec3> b{{0, 1, 0}, {1, 0, 0}};
    const AngularStats orth = angular_error(a, b);
    CHECK(orth.mean_deg == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(orth.median_deg == doctest::Approx(90.0).epsilon(1e-12));

    const std::vector<Vec3> mixed_a{{1, 0, 0}, {1, 0, 0}};
    const std::vector<Vec3> mixed_b{{1, 0, 0}, {0, 1, 0}};
    const AngularStats mixed = angular_error(mixed_a, mixed_b);
    CHECK(mixed.mean_deg == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(mixed.median_deg == doctest::Approx(45.0).epsilon(1e-12));

    const std::vector<Vec3> three{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK_THROWS_AS(angular_error(a, three), LengthMismatch);
}

TEST_CASE("angular error is rotation invariant") {
    Rng rng(6);
    std::vector<Vec3> a, b;
    for (int i = 0; i < 50; ++i) {
        a.push_back(normalize(Vec3{rng.normal(), rng.normal(), rng.normal()}));
        b.push_back(normalize(Vec3{rng.normal(), rng.normal(), rng.normal()}));
    }
    const double ang = 0.7;
    auto rot = [&](const Vec3& v) {
        return Vec3{v.x * std::cos(ang) - v.z * std::sin(ang), v.y,
                    v.x * std::sin(ang) + v.z * std::cos(ang)};
    };
    std::vector<Vec3> ra, rb;
    for (size_t i = 0; i < a.size(); ++i) {
        ra.push_back(rot(a[i]));
        rb.push_back(rot(b[i]));
    }
    const AngularStats s0 = angular_error(a, b);
    const AngularStats s1 = angular_error(ra, rb);
    CHECK(s0.mean_deg == doctest::Approx(s1.mean_deg).epsilon(1e-9));
    CHECK(s0.median_deg == doctest::Approx(s1.median_deg).epsilon(1e-9));
}

TEST_CASE("chamfer distance on pinned examples") {
    const std::vector<Vec3> a{{0, 0, 0}};
    CHECK(chamfer_l1(a, a) == 0.0);

    const std::vector<Vec3> b{{1, 0, 0}};
    CHECK(chamfer_l1(a, b) == doctest::Approx(1.0));

    const std::vector<Vec3> two{{0, 0, 0}, {2, 0, 0}};
    const std::vector<Vec3> one{{1, 0, 0}};
    CHECK(chamfer_l1(two, one) == doctest::Approx(1.0));

    CHECK(chamfer_l1(one, two) == doctest::Approx(chamfer_l1(two, one)).epsilon(1e-15));
    CHECK_THROWS_AS(chamfer_l1({}, a), EmptySet);
}

TEST_CASE("mask iou") {
    MaskImage a(4, 4), b(4, 4);
    CHECK(mask_iou(a, b) == 1.0);  // both empty

    a.set(0, 0, true);
    b.set(3, 3, true);
    CHECK(mask_iou(a, b) == 0.0);  // disjoint

    MaskImage c(4, 4), d(4, 4);
    c.set(0, 0, true);
    c.set(1, 0, true);
    d.set(1, 0, true);
    d.set(2, 0, true);
    CHECK(mask_iou(c, d) == doctest::Approx(1.0 / 3.0));

    CHECK(mask_iou(c, c) == 1.0);
}
