#include "nemto/envmap.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "nemto/errors.hpp"
#include "nemto/rng.hpp"

namespace nemto {

namespace {

int wrap_x(int x, int w) {
    x %= w;
    return x < 0 ? x + w : x;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void dir_to_uv(const Vec3& d, double& u, double& v) {
    assert(std::fabs(norm(d) - 1.0) < 1e-6);
    v = std::acos(std::clamp(d.y, -1.0, 1.0)) / M_PI;
    double raw = 0.5 + std::atan2(d.x, -d.z) / (2.0 * M_PI);
    u = raw - std::floor(raw);
    if (u >= 1.0) u = 0.0;
}

Vec3 uv_to_dir(double u, double v) {
    const double theta = v * M_PI;
    const double phi = (u - 0.5) * 2.0 * M_PI;
    const double st = std::sin(theta);
    return {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)};
}

EnvironmentMap::EnvironmentMap(ImageF texels) : texels_(std::move(texels)) {
    if (texels_.width < 2 || texels_.height < 2)
        throw NonPositiveDimensions("envmap: needs at least 2x2 texels");
    for (float t : texels_.data)
        if (!std::isfinite(t) || t < 0.0f)
            throw IoError("envmap: texels must be finite and nonnegative");
}

namespace {

struct BilinearCell {
    int x0, x1, y0, y1;
    double wx, wy;
};

BilinearCell locate(double u, double v, int w, int h) {
    BilinearCell c;
    const double fx = u * w - 0.5;
    const double fy = v * h - 0.5;
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    c.wx = fx - x0f;
    c.wy = fy - y0f;
    c.x0 = wrap_x(int(x0f), w);
    c.x1 = wrap_x(int(x0f) + 1, w);
    c.y0 = std::clamp(int(y0f), 0, h - 1);
    c.y1 = std::clamp(int(y0f) + 1, 0, h - 1);
    return c;
}

}  // namespace

Rgb EnvironmentMap::sample(const Vec3& d) const {
    double u, v;
    dir_to_uv(d, u, v);
    const BilinearCell c = locate(u, v, texels_.width, texels_.height);
    Rgb out;
    for (int ch = 0; ch < 3; ++ch) {
        const double t00 = texels_.at(c.x0, c.y0, ch);
        const double t10 = texels_.at(c.x1, c.y0, ch);
        const double t01 = texels_.at(c.x0, c.y1, ch);
        const double t11 = texels_.at(c.x1, c.y1, ch);
        out[ch] = (1.0 - c.wy) * ((1.0 - c.wx) * t00 + c.wx * t10) +
                  c.wy * ((1.0 - c.wx) * t01 + c.wx * t11);
    }
    return out;
}

EnvironmentMap::Sample EnvironmentMap::sample_grad(const Vec3& d) const {
    double u, v;
    dir_to_uv(d, u, v);
    const int w = texels_.width, h = texels_.height;
    const BilinearCell c = locate(u, v, w, h);

    // d(u,v)/d(direction). u depends on x and z, v on y only.
    const double planar2 = d.x * d.x + d.z * d.z;
    Vec3 du_dir{0.0, 0.0, 0.0}, dv_dir{0.0, 0.0, 0.0};
    if (planar2 > 1e-12) {
        du_dir.x = -d.z / (2.0 * M_PI * planar2);
        du_dir.z = d.x / (2.0 * M_PI * planar2);
    }
    const double sin_theta = std::sqrt(std::max(1.0 - d.y * d.y, 1e-12));
    dv_dir.y = -1.0 / (M_PI * sin_theta);

    Sample out;
    for (int ch = 0; ch < 3; ++ch) {
        const double t00 = texels_.at(c.x0, c.y0, ch);
        const double t10 = texels_.at(c.x1, c.y0, ch);
        const double t01 = texels_.at(c.x0, c.y1, ch);
        const double t11 = texels_.at(c.x1, c.y1, ch);
        out.value[ch] = (1.0 - c.wy) * ((1.0 - c.wx) * t00 + c.wx * t10) +
                        c.wy * ((1.0 - c.wx) * t01 + c.wx * t11);
        const double d_fx = (1.0 - c.wy) * (t10 - t00) + c.wy * (t11 - t01);
        const double d_fy = (1.0 - c.wx) * (t01 - t00) + c.wx * (t11 - t10);
        const double d_u = d_fx * w;
        const double d_v = d_fy * h;
        out.d_dir[ch] = d_u * du_dir + d_v * dv_dir;
    }
    return out;
}

EnvironmentMap EnvironmentMap::load(const std::string& path) {
    if (ends_with(path, ".png")) return EnvironmentMap(load_png_linear(path));
    return EnvironmentMap(load_pfm(path));
}

void EnvironmentMap::save_pfm(const std::string& path) const { nemto::save_pfm(texels_, path); }

void EnvironmentMap::save_png_preview(const std::string& path) const {
    nemto::save_png_preview(texels_, path);
}

EnvironmentMap make_constant_env(int width, int height, const Rgb& c) {
    ImageF img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = float(c[ch]);
    return EnvironmentMap(std::move(img));
}

EnvironmentMap make_gradient_env(int width, int height) {
    ImageF img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 d = uv_to_dir((x + 0.5) / width, (y + 0.5) / height);
            img.at(x, y, 0) = float(0.5 + 0.45 * d.x);
            img.at(x, y, 1) = float(0.5 + 0.45 * d.y);
            img.at(x, y, 2) = float(0.5 + 0.45 * d.z);
        }
    }
    return EnvironmentMap(std::move(img));
}

EnvironmentMap make_blob_env(int width, int height, int blob_count, uint64_t seed) {
    Rng rng(seed);
    struct Blob {
        Vec3 dir;
        Rgb color;
        double sharpness;
    };
    std::vector<Blob> blobs;
    for (int i = 0; i < blob_count; ++i) {
        const double y = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
        Blob b;
        b.dir = {r * std::cos(phi), y, r * std::sin(phi)};
        b.color = {rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)};
        b.sharpness = rng.uniform(4.0, 24.0);
        blobs.push_back(b);
    }
    ImageF img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 d = uv_to_dir((x + 0.5) / width, (y + 0.5) / height);
            // Low-frequency base keeps the map informative everywhere.
            Rgb c{0.25 + 0.2 * d.x, 0.25 + 0.2 * d.y, 0.25 + 0.2 * d.z};
            for (const Blob& b : blobs)
                c += std::exp(b.sharpness * (dot(d, b.dir) - 1.0)) * b.color;
            for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = float(std::max(0.0, c[ch]));
        }
    }
    return EnvironmentMap(std::move(img));
}

EnvironmentMap make_checker_env(int width, int height, int bands_u, int bands_v) {
    ImageF img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int iu = int(double(x) / width * bands_u);
            const int iv = int(double(y) / height * bands_v);
            const bool on = (iu + iv) % 2 == 0;
            img.at(x, y, 0) = on ? 1.0f : 0.08f;
            img.at(x, y, 1) = on ? 0.85f : 0.12f;
            img.at(x, y, 2) = on ? 0.2f : 0.5f;
        }
    }
    return EnvironmentMap(std::move(img));
}

}  // namespace nemto
