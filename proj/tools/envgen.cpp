// Procedural environment map generator: writes equirectangular PFM radiance
// maps for dataset generation and relighting experiments.

#include <CLI11.hpp>

#include <cstdio>

#include "nemto/envmap.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nemto-envgen: procedural equirectangular environment maps"};

    std::string kind = "blobs";
    std::string out;
    int width = 256, height = 128;
    int blobs = 6;
    uint64_t seed = 0;
    double r = 1.0, g = 1.0, b = 1.0;
    int bands_u = 12, bands_v = 6;

    app.add_option("--kind", kind, "constant|gradient|blobs|checker")
        ->check(CLI::IsMember({"constant", "gradient", "blobs", "checker"}));
    app.add_option("--out", out, "output .pfm path")->required();
    app.add_option("--width", width)->check(CLI::PositiveNumber);
    app.add_option("--height", height)->check(CLI::PositiveNumber);
    app.add_option("--blobs", blobs, "blob count for --kind blobs");
    app.add_option("--seed", seed);
    app.add_option("--r", r, "red value for --kind constant");
    app.add_option("--g", g);
    app.add_option("--b", b);
    app.add_option("--bands-u", bands_u);
    app.add_option("--bands-v", bands_v);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        nemto::EnvironmentMap env;
        if (kind == "constant")
            env = nemto::make_constant_env(width, height, {r, g, b});
        else if (kind == "gradient")
            env = nemto::make_gradient_env(width, height);
        else if (kind == "blobs")
            env = nemto::make_blob_env(width, height, blobs, seed);
        else
            env = nemto::make_checker_env(width, height, bands_u, bands_v);
        env.save_pfm(out);
        std::printf("wrote %s (%dx%d, %s)\n", out.c_str(), width, height, kind.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "envgen: %s\n", e.what());
        return 2;
    }
    return 0;
}
