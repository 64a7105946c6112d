#pragma once

#include <span>
#include <stdexcept>

#include "nemto/image.hpp"
#include "nemto/vec3.hpp"

namespace nemto {

struct ZeroPixelMask : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ImageTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 10 log10(1 / MSE) over the (optionally masked) pixels of two [0,1] images,
/// capped at 99 dB. Throws ZeroPixelMask when the mask selects nothing.
double psnr(const ImageF& pred, const ImageF& ref, const MaskImage* mask = nullptr);

/// Windowed SSIM on the channel-mean grayscale: 11x11 Gaussian window with
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1, averaged over windows
/// fully inside the frame (window centers inside the mask when given).
double ssim(const ImageF& pred, const ImageF& ref, const MaskImage* mask = nullptr);

struct AngularStats {
    double mean_deg = 0.0;
    double median_deg = 0.0;
};
/// Per-pair angles acos(a . b) in degrees between matched unit directions.
AngularStats angular_error(std::span<const Vec3> a, std::span<const Vec3> b);

/// Symmetric mean nearest-neighbor distance (brute force, desk scale).
double chamfer_l1(std::span<const Vec3> a, std::span<const Vec3> b);

/// Intersection over union of two masks; 1 when both are empty.
double mask_iou(const MaskImage& pred, const MaskImage& ref);

}  // namespace nemto
