#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nemto/sdf.hpp"
#include "nemto/vec3.hpp"

namespace nemto {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    double area() const;
};

/// Isosurface of the field's zero-level set over its bounding box, sampled on
/// a (resolution+1)^3 lattice. Cells are split into six tetrahedra sharing the
/// main diagonal, which keeps the result watertight on the grid; crossings are
/// interpolated linearly and triangles are oriented outward (along the cell's
/// linearized gradient). Throws EmptyLevelSet when the grid contains no sign
/// change.
TriangleMesh extract_mesh(const SdfField& field, int resolution);

void save_obj(const TriangleMesh& mesh, const std::string& path);
TriangleMesh load_obj(const std::string& path);

/// Area-weighted surface samples (deterministic for a fixed seed).
std::vector<Vec3> sample_mesh_points(const TriangleMesh& mesh, int count, uint64_t seed);

}  // namespace nemto
