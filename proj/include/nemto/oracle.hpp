#pragma once

#include <memory>
#include <string>

#include "nemto/camera.hpp"
#include "nemto/envmap.hpp"
#include "nemto/image.hpp"
#include "nemto/optics.hpp"
#include "nemto/sdf.hpp"

namespace nemto {

/// Scene for the analytic smooth-dielectric oracle.
struct SyntheticScene {
    std::shared_ptr<SdfField> field;
    const EnvironmentMap* env = nullptr;
    double ior_object = 1.4723;
    double ior_air = optics::kAirIor;
    int b_max = 8;  // total interface budget per path, entry included
};

/// Snell path through the object: refraction at every interface, specular
/// bounce on total internal reflection.
struct DielectricPath {
    Vec3 exit_direction;
    int bounce_count = 1;
    int tir_count = 0;
    bool escaped = false;  // true when the ray exited before the budget ran out
};

/// Follows the exact refracted path from a front-facing entry hit.
/// omega_i points toward the ray origin (away from the surface).
DielectricPath trace_dielectric(const SyntheticScene& scene, const SurfaceHit& entry,
                                const Vec3& omega_i, int b_max);

/// One oracle radiance sample. Misses render black (masked rendering);
/// non-exiting paths fall back to pure reflection.
Rgb render_pixel(const SyntheticScene& scene, const Ray& ray);

/// Full-frame render plus the hit mask (parallel across rows, deterministic).
void render_view(const SyntheticScene& scene, const Camera& camera, ImageF& image,
                 MaskImage& mask);

struct DatasetParams {
    int n_views = 20;
    int resolution = 64;
    uint64_t seed = 0;
    double camera_radius = 3.0;
    double vertical_fov_deg = 45.0;
    std::string shape = "sphere";
};

/// Renders the dataset layout: cameras.json, images/view_%04d.{pfm,png},
/// masks/view_%04d.png, env.pfm, meta.json. Views are split 50/50 into
/// train/test by a seeded shuffle.
void generate_dataset(const SyntheticScene& scene, const DatasetParams& params,
                      const std::string& out_dir);

}  // namespace nemto
