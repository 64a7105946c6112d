#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nemto {

/// Linear-radiance RGB image, 32-bit floats, rows stored top to bottom.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // height*width*3

    ImageF() = default;
    ImageF(int w, int h) : width(w), height(h), data(size_t(w) * h * 3, 0.0f) {}

    float& at(int x, int y, int c) { return data[(size_t(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const { return data[(size_t(y) * width + x) * 3 + c]; }
};

/// Binary mask, 1 byte per pixel (0 or 255 on disk).
struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    MaskImage() = default;
    MaskImage(int w, int h) : width(w), height(h), data(size_t(w) * h, 0) {}

    bool at(int x, int y) const { return data[size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[size_t(y) * width + x] = v ? 255 : 0; }
    size_t count() const;
};

// Portable FloatMap ("PF", RGB, 32-bit little-endian, rows bottom to top).
ImageF load_pfm(const std::string& path);
void save_pfm(const ImageF& img, const std::string& path);

// 8-bit PNG. save_png_preview clamps to [0,1] and sRGB-encodes (exponent 1/2.2);
// load_png_linear decodes back to linear radiance.
void save_png_preview(const ImageF& img, const std::string& path);
ImageF load_png_linear(const std::string& path);

void save_mask_png(const MaskImage& mask, const std::string& path);
MaskImage load_mask_png(const std::string& path);

/// Clamp to [0,1] and sRGB-encode in place (for metric evaluation of HDR images).
ImageF tonemap(const ImageF& img);

}  // namespace nemto
