#include "nemto/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "nemto/errors.hpp"

namespace nemto {

size_t MaskImage::count() const {
    size_t n = 0;
    for (uint8_t v : data) n += v != 0;
    return n;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool host_is_little_endian() {
    const uint16_t probe = 1;
    return *reinterpret_cast<const uint8_t*>(&probe) == 1;
}

void byteswap_floats(float* p, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        uint32_t v;
        std::memcpy(&v, p + i, 4);
        v = __builtin_bswap32(v);
        std::memcpy(p + i, &v, 4);
    }
}

// Reads one whitespace-delimited token from a PFM header.
std::string read_token(std::FILE* f) {
    std::string tok;
    int c;
    while ((c = std::fgetc(f)) != EOF && std::isspace(c)) {
    }
    if (c == EOF) throw UnexpectedEof("pfm: truncated header");
    do {
        tok.push_back(char(c));
    } while ((c = std::fgetc(f)) != EOF && !std::isspace(c));
    if (c == EOF) throw UnexpectedEof("pfm: truncated header");
    return tok;
}

}  // namespace

ImageF load_pfm(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("pfm: cannot open " + path);

    const std::string magic = read_token(f.get());
    if (magic != "PF") throw MalformedHeader("pfm: expected 'PF' magic in " + path);

    long w = 0, h = 0;
    double scale = 0.0;
    try {
        w = std::stol(read_token(f.get()));
        h = std::stol(read_token(f.get()));
        scale = std::stod(read_token(f.get()));
    } catch (const std::invalid_argument&) {
        throw MalformedHeader("pfm: non-numeric header field in " + path);
    }
    if (w <= 0 || h <= 0) throw NonPositiveDimensions("pfm: bad dimensions in " + path);
    if (scale == 0.0) throw MalformedHeader("pfm: zero scale in " + path);

    ImageF img{int(w), int(h)};
    const size_t row_floats = size_t(w) * 3;
    std::vector<float> row(row_floats);
    // PFM rows are stored bottom to top.
    for (long y = h - 1; y >= 0; --y) {
        if (std::fread(row.data(), 4, row_floats, f.get()) != row_floats)
            throw UnexpectedEof("pfm: truncated payload in " + path);
        const bool file_le = scale < 0.0;
        if (file_le != host_is_little_endian()) byteswap_floats(row.data(), row_floats);
        std::copy(row.begin(), row.end(), img.data.begin() + size_t(y) * row_floats);
    }
    const float mag = float(std::fabs(scale));
    if (mag != 1.0f)
        for (float& v : img.data) v *= mag;
    return img;
}

void save_pfm(const ImageF& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0)
        throw NonPositiveDimensions("pfm: refusing to write empty image");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("pfm: cannot write " + path);
    std::fprintf(f.get(), "PF\n%d %d\n-1.0\n", img.width, img.height);
    const size_t row_floats = size_t(img.width) * 3;
    std::vector<float> row(row_floats);
    for (int y = img.height - 1; y >= 0; --y) {
        std::copy_n(img.data.begin() + size_t(y) * row_floats, row_floats, row.begin());
        if (!host_is_little_endian()) byteswap_floats(row.data(), row_floats);
        if (std::fwrite(row.data(), 4, row_floats, f.get()) != row_floats)
            throw IoError("pfm: short write to " + path);
    }
}

namespace {

float srgb_encode(float v) { return std::pow(std::clamp(v, 0.0f, 1.0f), 1.0f / 2.2f); }
float srgb_decode(float v) { return std::pow(std::clamp(v, 0.0f, 1.0f), 2.2f); }

[[noreturn]] void png_abort(png_structp, png_const_charp msg) {
    throw IoError(std::string("png: ") + msg);
}

void write_png8(const std::string& path, int w, int h, int channels, const uint8_t* pixels) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("png: cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_abort, nullptr);
    if (!png) throw IoError("png: create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    try {
        png_init_io(png, f.get());
        png_set_IHDR(png, info, w, h, 8,
                     channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<png_bytep> rows(h);
        for (int y = 0; y < h; ++y)
            rows[y] = const_cast<png_bytep>(pixels + size_t(y) * w * channels);
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

struct Png8 {
    int width = 0, height = 0;
    std::vector<uint8_t> rgb;  // always expanded to 3 channels
};

Png8 read_png8(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("png: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_abort, nullptr);
    if (!png) throw IoError("png: create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    Png8 out;
    try {
        png_init_io(png, f.get());
        png_read_info(png, info);
        png_set_expand(png);
        png_set_strip_16(png);
        png_set_strip_alpha(png);
        png_set_gray_to_rgb(png);
        png_read_update_info(png, info);
        out.width = int(png_get_image_width(png, info));
        out.height = int(png_get_image_height(png, info));
        if (png_get_channels(png, info) != 3) throw IoError("png: unexpected channel count");
        out.rgb.resize(size_t(out.width) * out.height * 3);
        std::vector<png_bytep> rows(out.height);
        for (int y = 0; y < out.height; ++y)
            rows[y] = out.rgb.data() + size_t(y) * out.width * 3;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

}  // namespace

void save_png_preview(const ImageF& img, const std::string& path) {
    std::vector<uint8_t> bytes(size_t(img.width) * img.height * 3);
    for (size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = uint8_t(std::lround(srgb_encode(img.data[i]) * 255.0f));
    write_png8(path, img.width, img.height, 3, bytes.data());
}

ImageF load_png_linear(const std::string& path) {
    const Png8 png = read_png8(path);
    ImageF img(png.width, png.height);
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = srgb_decode(float(png.rgb[i]) / 255.0f);
    return img;
}

void save_mask_png(const MaskImage& mask, const std::string& path) {
    write_png8(path, mask.width, mask.height, 1, mask.data.data());
}

MaskImage load_mask_png(const std::string& path) {
    const Png8 png = read_png8(path);
    MaskImage mask(png.width, png.height);
    for (size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = png.rgb[i * 3] >= 128 ? 255 : 0;
    return mask;
}

ImageF tonemap(const ImageF& img) {
    ImageF out(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = srgb_encode(img.data[i]);
    return out;
}

}  // namespace nemto
