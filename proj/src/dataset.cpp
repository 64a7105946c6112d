#include "nemto/dataset.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "nemto/errors.hpp"

namespace nemto {

namespace {

Vec3 vec3_from(const nlohmann::json& a) {
    return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

std::string view_path(const std::string& dir, const char* sub, int index, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "view_%04d.%s", index, ext);
    return dir + "/" + sub + "/" + buf;
}

}  // namespace

Dataset load_dataset(const std::string& dir, bool load_images) {
    Dataset ds;

    std::ifstream cam_in(dir + "/cameras.json");
    if (!cam_in) throw IoError("dataset: missing " + dir + "/cameras.json");
    nlohmann::json cam_list;
    cam_in >> cam_list;

    for (size_t i = 0; i < cam_list.size(); ++i) {
        const auto& j = cam_list[i];
        Camera cam;
        cam.position = vec3_from(j.at("position"));
        cam.look_at = vec3_from(j.at("look_at"));
        cam.up = vec3_from(j.at("up"));
        cam.vertical_fov_deg = j.at("fov_deg").get<double>();
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
        cam.split = j.at("split").get<std::string>();
        ds.cameras.push_back(cam);
        (cam.split == "train" ? ds.train_views : ds.test_views).push_back(int(i));
    }

    std::ifstream meta_in(dir + "/meta.json");
    if (!meta_in) throw IoError("dataset: missing " + dir + "/meta.json");
    nlohmann::json meta;
    meta_in >> meta;
    ds.ior_object = meta.at("ior_object").get<double>();
    ds.ior_air = meta.at("ior_air").get<double>();
    ds.seed = meta.value("seed", 0ull);
    ds.shape = meta.value("shape", std::string());

    ds.env = EnvironmentMap::load(dir + "/env.pfm");

    if (load_images) {
        ds.images.reserve(ds.cameras.size());
        ds.masks.reserve(ds.cameras.size());
        for (size_t i = 0; i < ds.cameras.size(); ++i) {
            ds.images.push_back(load_pfm(view_path(dir, "images", int(i), "pfm")));
            ds.masks.push_back(load_mask_png(view_path(dir, "masks", int(i), "png")));
        }
    }
    return ds;
}

}  // namespace nemto
