#pragma once

#include <string>
#include <vector>

#include "nemto/camera.hpp"
#include "nemto/envmap.hpp"
#include "nemto/image.hpp"

namespace nemto {

/// In-memory copy of the on-disk dataset layout.
struct Dataset {
    std::vector<Camera> cameras;
    std::vector<ImageF> images;
    std::vector<MaskImage> masks;
    EnvironmentMap env;
    double ior_object = 1.4723;
    double ior_air = 1.00028;
    uint64_t seed = 0;
    std::string shape;  // analytic generator shape, when recorded

    std::vector<int> train_views;
    std::vector<int> test_views;
};

Dataset load_dataset(const std::string& dir, bool load_images = true);

}  // namespace nemto
