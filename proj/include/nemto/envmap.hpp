#pragma once

#include <string>

#include "nemto/image.hpp"
#include "nemto/vec3.hpp"

namespace nemto {

/// Equirectangular environment radiance map. +y is the zenith; u wraps
/// horizontally, v clamps at the poles; texels are linear radiance.
class EnvironmentMap {
public:
    EnvironmentMap() = default;
    explicit EnvironmentMap(ImageF texels);

    int width() const { return texels_.width; }
    int height() const { return texels_.height; }
    const ImageF& texels() const { return texels_; }

    /// Bilinear radiance lookup along a unit direction.
    Rgb sample(const Vec3& d) const;

    /// Radiance plus the Jacobian of each channel w.r.t. the direction.
    struct Sample {
        Rgb value;
        Vec3 d_dir[3];  // d value[c] / d direction
    };
    Sample sample_grad(const Vec3& d) const;

    static EnvironmentMap load(const std::string& path);  // .pfm or .png by extension
    void save_pfm(const std::string& path) const;
    void save_png_preview(const std::string& path) const;

private:
    ImageF texels_;
};

/// Equirectangular mapping of a unit direction; u in [0,1), v in [0,1].
void dir_to_uv(const Vec3& d, double& u, double& v);
Vec3 uv_to_dir(double u, double v);

// Procedural maps (dataset generation and tests).
EnvironmentMap make_constant_env(int width, int height, const Rgb& c);
EnvironmentMap make_gradient_env(int width, int height);
EnvironmentMap make_blob_env(int width, int height, int blob_count, uint64_t seed);
EnvironmentMap make_checker_env(int width, int height, int bands_u, int bands_v);

}  // namespace nemto
