#pragma once

#include <string>
#include <vector>

#include "nemto/vec3.hpp"

namespace nemto {

/// Pinhole camera. Pixel rays go through pixel centers; row 0 is the top of
/// the image.
struct Camera {
    Vec3 position;
    Vec3 look_at;
    Vec3 up{0.0, 1.0, 0.0};
    double vertical_fov_deg = 45.0;
    int width = 0;
    int height = 0;
    std::string split = "train";

    Ray pixel_ray(double px, double py) const;
};

/// n camera positions on the upper hemisphere (y >= 0) of the given radius
/// around look_at, placed on a Fibonacci lattice, all aimed at look_at.
std::vector<Camera> fibonacci_cameras(int n, double radius, const Vec3& look_at,
                                      double vertical_fov_deg, int width, int height);

}  // namespace nemto
