#include "nemto/camera.hpp"

#include <cassert>
#include <cmath>

namespace nemto {

Ray Camera::pixel_ray(double px, double py) const {
    assert(width > 0 && height > 0);
    const Vec3 forward = normalize(look_at - position);
    const Vec3 right = normalize(cross(forward, up));
    const Vec3 cam_up = cross(right, forward);

    const double tan_half = std::tan(vertical_fov_deg * M_PI / 180.0 * 0.5);
    const double aspect = double(width) / double(height);
    const double ndc_x = (px + 0.5) / width * 2.0 - 1.0;
    const double ndc_y = 1.0 - (py + 0.5) / height * 2.0;

    const Vec3 dir = forward + ndc_x * aspect * tan_half * right + ndc_y * tan_half * cam_up;
    return Ray{position, normalize(dir)};
}

std::vector<Camera> fibonacci_cameras(int n, double radius, const Vec3& look_at,
                                      double vertical_fov_deg, int width, int height) {
    assert(n >= 1 && radius > 0.0);
    // Golden-angle azimuth increment.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double azimuth_step = 2.0 * M_PI * (1.0 - 1.0 / golden);

    std::vector<Camera> cams;
    cams.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double y = 1.0 - (i + 0.5) / double(n);  // stays inside (0, 1)
        const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
        const double phi = i * azimuth_step;
        const Vec3 dir{r * std::cos(phi), y, r * std::sin(phi)};

        Camera cam;
        cam.position = look_at + radius * dir;
        cam.look_at = look_at;
        cam.up = std::fabs(dir.y) > 0.999 ? Vec3{0.0, 0.0, 1.0} : Vec3{0.0, 1.0, 0.0};
        cam.vertical_fov_deg = vertical_fov_deg;
        cam.width = width;
        cam.height = height;
        cams.push_back(cam);
    }
    return cams;
}

}  // namespace nemto
