#include "nemto/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nemto/errors.hpp"
#include "nemto/parallel.hpp"

namespace nemto {

namespace {

void check_same_size(const ImageF& a, const ImageF& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch("metrics: image dimensions differ");
}

}  // namespace

double psnr(const ImageF& pred, const ImageF& ref, const MaskImage* mask) {
    check_same_size(pred, ref);
    if (mask && (mask->width != pred.width || mask->height != pred.height))
        throw DimensionMismatch("metrics: mask dimensions differ");

    double sum = 0.0;
    size_t count = 0;
    for (int y = 0; y < pred.height; ++y) {
        for (int x = 0; x < pred.width; ++x) {
            if (mask && !mask->at(x, y)) continue;
            for (int c = 0; c < 3; ++c) {
                const double d = double(pred.at(x, y, c)) - double(ref.at(x, y, c));
                sum += d * d;
            }
            count += 3;
        }
    }
    if (count == 0) throw ZeroPixelMask("psnr: mask selects no pixels");
    const double mse = sum / double(count);
    if (mse <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
    std::vector<double> w(kWindow * kWindow);
    const int half = kWindow / 2;
    double total = 0.0;
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
            const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            w[(dy + half) * kWindow + (dx + half)] = g;
            total += g;
        }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> to_gray(const ImageF& img) {
    std::vector<double> g(size_t(img.width) * img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            g[size_t(y) * img.width + x] =
                (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / 3.0;
    return g;
}

}  // namespace

double ssim(const ImageF& pred, const ImageF& ref, const MaskImage* mask) {
    check_same_size(pred, ref);
    if (pred.width < kWindow || pred.height < kWindow)
        throw ImageTooSmall("ssim: image smaller than the 11x11 window");

    static const std::vector<double> window = gaussian_window();
    const std::vector<double> gx = to_gray(pred);
    const std::vector<double> gy = to_gray(ref);
    const int w = pred.width, h = pred.height;
    const int half = kWindow / 2;

    double total = 0.0;
    size_t count = 0;
    for (int cy = half; cy < h - half; ++cy) {
        for (int cx = half; cx < w - half; ++cx) {
            if (mask && !mask->at(cx, cy)) continue;
            double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    const double wgt = window[(dy + half) * kWindow + (dx + half)];
                    const double a = gx[size_t(cy + dy) * w + (cx + dx)];
                    const double b = gy[size_t(cy + dy) * w + (cx + dx)];
                    mx += wgt * a;
                    my += wgt * b;
                    mxx += wgt * a * a;
                    myy += wgt * b * b;
                    mxy += wgt * a * b;
                }
            }
            const double vx = mxx - mx * mx;
            const double vy = myy - my * my;
            const double cov = mxy - mx * my;
            const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
            const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
            total += num / den;
            count += 1;
        }
    }
    if (count == 0) throw ZeroPixelMask("ssim: mask selects no windows");
    return total / double(count);
}

AngularStats angular_error(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.size() != b.size()) throw LengthMismatch("angular_error: size mismatch");
    if (a.empty()) throw LengthMismatch("angular_error: empty input");
    std::vector<double> deg(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        deg[i] = std::acos(std::clamp(dot(a[i], b[i]), -1.0, 1.0)) * 180.0 / M_PI;
    AngularStats stats;
    for (double d : deg) stats.mean_deg += d;
    stats.mean_deg /= double(deg.size());
    std::sort(deg.begin(), deg.end());
    const size_t n = deg.size();
    stats.median_deg = n % 2 == 1 ? deg[n / 2] : 0.5 * (deg[n / 2 - 1] + deg[n / 2]);
    return stats;
}

namespace {

double mean_nearest(std::span<const Vec3> from, std::span<const Vec3> to) {
    std::vector<double> nearest(from.size());
    parallel_chunks(from.size(), 256, [&](size_t, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            double best = 1e300;
            for (const Vec3& q : to) best = std::min(best, norm2(from[i] - q));
            nearest[i] = std::sqrt(best);
        }
    });
    double sum = 0.0;
    for (double d : nearest) sum += d;
    return sum / double(from.size());
}

}  // namespace

double chamfer_l1(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) throw EmptySet("chamfer_l1: empty point set");
    return 0.5 * (mean_nearest(a, b) + mean_nearest(b, a));
}

double mask_iou(const MaskImage& pred, const MaskImage& ref) {
    if (pred.width != ref.width || pred.height != ref.height)
        throw DimensionMismatch("mask_iou: dimensions differ");
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const bool p = pred.data[i] != 0;
        const bool r = ref.data[i] != 0;
        inter += p && r;
        uni += p || r;
    }
    if (uni == 0) return 1.0;
    return double(inter) / double(uni);
}

}  // namespace nemto
