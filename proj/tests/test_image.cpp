#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nemto/errors.hpp"
#include "nemto/image.hpp"

using namespace nemto;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("pfm round trip is bit exact") {
    ImageF img(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = float(x * 0.1 + y * 1.5 + c * 7.0);

    const std::string path = temp_path("nemto_roundtrip.pfm");
    save_pfm(img, path);
    const ImageF back = load_pfm(path);
    REQUIRE(back.width == 5);
    REQUIRE(back.height == 3);
    CHECK(back.data == img.data);
}

TEST_CASE("pfm payload of a 1x1 image is 12 bytes after the header") {
    ImageF img(1, 1);
    img.at(0, 0, 0) = 0.25f;
    img.at(0, 0, 1) = 0.5f;
    img.at(0, 0, 2) = 1.0f;
    const std::string path = temp_path("nemto_tiny.pfm");
    save_pfm(img, path);

    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string header = "PF\n1 1\n-1.0\n";
    REQUIRE(content.substr(0, header.size()) == header);
    CHECK(content.size() - header.size() == 12);
}

TEST_CASE("grayscale pfm headers are rejected") {
    const std::string path = temp_path("nemto_gray.pfm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "Pf\n2 2\n-1.0\n";
        const float zeros[4] = {};
        out.write(reinterpret_cast<const char*>(zeros), sizeof(zeros));
    }
    CHECK_THROWS_AS(load_pfm(path), MalformedHeader);
}

TEST_CASE("truncated pfm payload raises UnexpectedEof") {
    const std::string path = temp_path("nemto_trunc.pfm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "PF\n2 2\n-1.0\n";
        const float one = 1.0f;
        out.write(reinterpret_cast<const char*>(&one), sizeof(one));
    }
    CHECK_THROWS_AS(load_pfm(path), UnexpectedEof);
}

TEST_CASE("non-positive pfm dimensions are rejected") {
    const std::string path = temp_path("nemto_dims.pfm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "PF\n0 4\n-1.0\n";
    }
    CHECK_THROWS_AS(load_pfm(path), NonPositiveDimensions);
}

TEST_CASE("mask png round trip") {
    MaskImage mask(8, 4);
    mask.set(1, 2, true);
    mask.set(7, 0, true);
    mask.set(3, 3, true);
    const std::string path = temp_path("nemto_mask.png");
    save_mask_png(mask, path);
    const MaskImage back = load_mask_png(path);
    REQUIRE(back.width == 8);
    REQUIRE(back.height == 4);
    CHECK(back.data == mask.data);
    CHECK(back.count() == 3);
}

TEST_CASE("png preview applies the sRGB curve") {
    ImageF img(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            img.at(x, y, 0) = 0.5f;
            img.at(x, y, 1) = 2.0f;   // clamps to 1
            img.at(x, y, 2) = -0.5f;  // clamps to 0
        }
    const std::string path = temp_path("nemto_preview.png");
    save_png_preview(img, path);
    const ImageF back = load_png_linear(path);
    CHECK(back.at(2, 2, 0) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(back.at(2, 2, 1) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(back.at(2, 2, 2) == doctest::Approx(0.0).epsilon(0.01));
}
