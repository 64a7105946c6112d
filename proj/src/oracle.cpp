#include "nemto/oracle.hpp"

#include <cassert>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nemto/errors.hpp"
#include "nemto/parallel.hpp"
#include "nemto/rng.hpp"

namespace nemto {

DielectricPath trace_dielectric(const SyntheticScene& scene, const SurfaceHit& entry,
                                const Vec3& omega_i, int b_max) {
    assert(entry.hit);
    DielectricPath path;
    path.bounce_count = 1;

    const optics::IorPair entering{scene.ior_air, scene.ior_object};
    const optics::IorPair leaving{scene.ior_object, scene.ior_air};

    auto into = optics::refract(omega_i, entry.n, entering);
    if (!into) {
        // Only reachable with ior_object < ior_air; counts as a non-exiting path.
        path.exit_direction = optics::reflect(omega_i, entry.n);
        path.tir_count = 1;
        return path;
    }

    Vec3 pos = entry.x;
    Vec3 dir = *into;
    while (path.bounce_count < b_max) {
        SurfaceHit exit;
        try {
            exit = inside_trace(*scene.field, Ray{pos, dir});
        } catch (const NoExit&) {
            path.exit_direction = dir;
            return path;
        }
        const Vec3 omega_inner = -dir;
        const Vec3 n_inner = -exit.n;  // normal on the interior (incident) side
        path.bounce_count += 1;
        if (auto out = optics::refract(omega_inner, n_inner, leaving)) {
            path.exit_direction = *out;
            path.escaped = true;
            return path;
        }
        path.tir_count += 1;
        dir = optics::reflect(omega_inner, n_inner);
        pos = exit.x;
    }
    path.exit_direction = dir;
    return path;
}

Rgb render_pixel(const SyntheticScene& scene, const Ray& ray) {
    const SurfaceHit hit = sphere_trace(*scene.field, ray);
    if (!hit.hit) return Rgb{0.0, 0.0, 0.0};

    const Vec3 omega_i = -ray.direction;
    const Vec3 omega_r = optics::reflect(omega_i, hit.n);
    const Rgb e_reflect = scene.env->sample(omega_r);

    const DielectricPath path = trace_dielectric(scene, hit, omega_i, scene.b_max);
    if (!path.escaped) return e_reflect;

    const optics::IorPair ior{scene.ior_air, scene.ior_object};
    const double cos_beta = std::clamp(dot(omega_i, hit.n), 1e-12, 1.0);
    const auto fresnel = optics::fresnel_reflectance(cos_beta, ior);
    const double f_r = fresnel ? fresnel->f_r : 1.0;

    const Rgb e_transmit = scene.env->sample(path.exit_direction);
    return optics::blend_radiance(f_r, ior, e_reflect, e_transmit);
}

void render_view(const SyntheticScene& scene, const Camera& camera, ImageF& image,
                 MaskImage& mask) {
    image = ImageF(camera.width, camera.height);
    mask = MaskImage(camera.width, camera.height);
    parallel_chunks(camera.height, 4, [&](size_t, size_t y0, size_t y1) {
        for (size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < camera.width; ++x) {
                const Ray ray = camera.pixel_ray(double(x), double(y));
                const SurfaceHit hit = sphere_trace(*scene.field, ray);
                mask.set(x, int(y), hit.hit);
                const Rgb c = render_pixel(scene, ray);
                for (int ch = 0; ch < 3; ++ch) image.at(x, int(y), ch) = float(c[ch]);
            }
        }
    });
}

namespace {

nlohmann::json vec3_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

std::string view_name(int index, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "view_%04d.%s", index, ext);
    return buf;
}

}  // namespace

void generate_dataset(const SyntheticScene& scene, const DatasetParams& params,
                      const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir + "/images", ec);
    fs::create_directories(out_dir + "/masks", ec);
    if (ec) throw IoError("generate: cannot create " + out_dir);

    const Vec3 target = scene.field->bounding_box().center();
    std::vector<Camera> cams =
        fibonacci_cameras(params.n_views, params.camera_radius, target,
                          params.vertical_fov_deg, params.resolution, params.resolution);

    // Seeded 50/50 split (train gets the extra view for odd counts).
    std::vector<int> order(cams.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    Rng rng(params.seed);
    rng.shuffle(order);
    const size_t n_train = (cams.size() + 1) / 2;
    for (size_t rank = 0; rank < order.size(); ++rank)
        cams[order[rank]].split = rank < n_train ? "train" : "test";

    nlohmann::json cam_list = nlohmann::json::array();
    for (size_t i = 0; i < cams.size(); ++i) {
        const Camera& cam = cams[i];
        ImageF image;
        MaskImage mask;
        render_view(scene, cam, image, mask);
        save_pfm(image, out_dir + "/images/" + view_name(int(i), "pfm"));
        save_png_preview(image, out_dir + "/images/" + view_name(int(i), "png"));
        save_mask_png(mask, out_dir + "/masks/" + view_name(int(i), "png"));

        cam_list.push_back({{"position", vec3_json(cam.position)},
                            {"look_at", vec3_json(cam.look_at)},
                            {"up", vec3_json(cam.up)},
                            {"fov_deg", cam.vertical_fov_deg},
                            {"width", cam.width},
                            {"height", cam.height},
                            {"split", cam.split}});
    }

    {
        std::ofstream out(out_dir + "/cameras.json");
        out << cam_list.dump(2) << "\n";
    }
    scene.env->save_pfm(out_dir + "/env.pfm");
    {
        nlohmann::json meta = {{"ior_object", scene.ior_object},
                               {"ior_air", scene.ior_air},
                               {"seed", params.seed},
                               {"n_views", params.n_views},
                               {"shape", params.shape},
                               {"camera_radius", params.camera_radius},
                               {"fov_deg", params.vertical_fov_deg},
                               {"resolution", params.resolution}};
        std::ofstream out(out_dir + "/meta.json");
        out << meta.dump(2) << "\n";
    }
}

}  // namespace nemto
