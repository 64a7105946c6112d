#include "nemto/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "nemto/errors.hpp"
#include "nemto/rng.hpp"

namespace nemto {

double TriangleMesh::area() const {
    double a = 0.0;
    for (const auto& t : triangles) {
        const Vec3& v0 = vertices[t[0]];
        a += 0.5 * norm(cross(vertices[t[1]] - v0, vertices[t[2]] - v0));
    }
    return a;
}

namespace {

// Cube corners in (x, y, z) bit order.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Six tetrahedra sharing the 0-6 diagonal; face diagonals match between
// neighboring cells, which is what makes the surface watertight.
constexpr int kTets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                             {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};

struct MeshBuilder {
    const SdfField* field;
    int res;
    Vec3 origin;
    Vec3 cell;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::unordered_map<uint64_t, int> edge_vertex;

    uint64_t lattice_id(int x, int y, int z) const {
        const uint64_t n = uint64_t(res) + 1;
        return (uint64_t(z) * n + y) * n + x;
    }

    Vec3 lattice_point(int x, int y, int z) const {
        return {origin.x + cell.x * x, origin.y + cell.y * y, origin.z + cell.z * z};
    }

    // Vertex on the edge between two lattice points, welded by edge key. The
    // interpolation parameter is computed from a canonical end ordering so both
    // adjacent cells produce the same position bit for bit.
    int edge_vertex_index(uint64_t ida, uint64_t idb, const Vec3& pa, const Vec3& pb,
                          double fa, double fb) {
        const bool swap = ida > idb;
        const uint64_t lo = swap ? idb : ida;
        const uint64_t hi = swap ? ida : idb;
        const uint64_t key = lo * 0x100000000ull ^ hi;
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const Vec3& p0 = swap ? pb : pa;
        const Vec3& p1 = swap ? pa : pb;
        const double f0 = swap ? fb : fa;
        const double f1 = swap ? fa : fb;
        double s = f0 / (f0 - f1);
        if (!std::isfinite(s)) s = 0.5;
        s = std::clamp(s, 0.0, 1.0);
        const Vec3 p = p0 + s * (p1 - p0);
        const int idx = int(vertices.size());
        vertices.push_back(p);
        edge_vertex.emplace(key, idx);
        return idx;
    }

    void emit(int a, int b, int c, const Vec3& outward) {
        const Vec3 n = cross(vertices[b] - vertices[a], vertices[c] - vertices[a]);
        if (dot(n, outward) >= 0.0)
            triangles.push_back({a, b, c});
        else
            triangles.push_back({a, c, b});
    }

    void process_tet(const uint64_t id[4], const Vec3 p[4], const double f[4]) {
        int inside[4], outside[4];
        int ni = 0, no = 0;
        for (int i = 0; i < 4; ++i) {
            if (f[i] < 0.0)
                inside[ni++] = i;
            else
                outside[no++] = i;
        }
        if (ni == 0 || no == 0) return;

        // Linearized field gradient inside the tet: rows (p_i - p0) . g = f_i - f0.
        const Vec3 e1 = p[1] - p[0], e2 = p[2] - p[0], e3 = p[3] - p[0];
        const double det = dot(e1, cross(e2, e3));
        Vec3 outward{0.0, 0.0, 0.0};
        if (std::fabs(det) > 1e-30) {
            const double d1 = f[1] - f[0], d2 = f[2] - f[0], d3 = f[3] - f[0];
            outward = (d1 * cross(e2, e3) + d2 * cross(e3, e1) + d3 * cross(e1, e2)) / det;
        }

        auto ev = [&](int a, int b) {
            return edge_vertex_index(id[a], id[b], p[a], p[b], f[a], f[b]);
        };

        if (ni == 1) {
            const int i = inside[0];
            emit(ev(i, outside[0]), ev(i, outside[1]), ev(i, outside[2]), outward);
        } else if (ni == 3) {
            const int o = outside[0];
            emit(ev(inside[0], o), ev(inside[1], o), ev(inside[2], o), outward);
        } else {
            const int i0 = inside[0], i1 = inside[1];
            const int o0 = outside[0], o1 = outside[1];
            const int a = ev(i0, o0), b = ev(i0, o1), c = ev(i1, o1), d = ev(i1, o0);
            emit(a, b, c, outward);
            emit(a, c, d, outward);
        }
    }
};

}  // namespace

TriangleMesh extract_mesh(const SdfField& field, int resolution) {
    if (resolution < 16 || resolution > 512)
        throw std::invalid_argument("extract_mesh: resolution must be in [16, 512]");

    const Aabb& box = field.bounding_box();
    MeshBuilder mb;
    mb.field = &field;
    mb.res = resolution;
    mb.origin = box.lo;
    mb.cell = (box.hi - box.lo) / double(resolution);

    const int n = resolution + 1;
    const size_t plane_size = size_t(n) * n;
    std::vector<double> plane0(plane_size), plane1(plane_size);
    std::vector<Vec3> pts(plane_size);

    auto fill_plane = [&](int z, std::vector<double>& out) {
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) pts[size_t(y) * n + x] = mb.lattice_point(x, y, z);
        field.query_many(pts, out);
    };

    fill_plane(0, plane0);
    bool any_negative = false, any_nonnegative = false;

    for (int z = 0; z < resolution; ++z) {
        fill_plane(z + 1, plane1);
        for (int y = 0; y < resolution; ++y) {
            for (int x = 0; x < resolution; ++x) {
                uint64_t id[8];
                Vec3 p[8];
                double f[8];
                for (int c = 0; c < 8; ++c) {
                    const int cx = x + kCorner[c][0];
                    const int cy = y + kCorner[c][1];
                    const int cz = kCorner[c][2];
                    id[c] = mb.lattice_id(cx, cy, z + cz);
                    p[c] = mb.lattice_point(cx, cy, z + cz);
                    f[c] = (cz == 0 ? plane0 : plane1)[size_t(cy) * n + cx];
                    (f[c] < 0.0 ? any_negative : any_nonnegative) = true;
                }
                for (const auto& tet : kTets) {
                    const uint64_t tid[4] = {id[tet[0]], id[tet[1]], id[tet[2]], id[tet[3]]};
                    const Vec3 tp[4] = {p[tet[0]], p[tet[1]], p[tet[2]], p[tet[3]]};
                    const double tf[4] = {f[tet[0]], f[tet[1]], f[tet[2]], f[tet[3]]};
                    mb.process_tet(tid, tp, tf);
                }
            }
        }
        std::swap(plane0, plane1);
    }

    if (mb.triangles.empty()) {
        if (!(any_negative && any_nonnegative))
            throw EmptyLevelSet("extract_mesh: no sign change in the sampled grid");
        throw EmptyLevelSet("extract_mesh: level set produced no triangles");
    }

    TriangleMesh mesh;
    mesh.vertices = std::move(mb.vertices);
    mesh.triangles = std::move(mb.triangles);
    return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("obj: cannot write " + path);
    for (const Vec3& v : mesh.vertices)
        std::fprintf(f, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    for (const auto& t : mesh.triangles)
        std::fprintf(f, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    std::fclose(f);
}

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("obj: cannot open " + path);
    TriangleMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> t{};
            for (int i = 0; i < 3; ++i) {
                std::string tok;
                ls >> tok;
                t[i] = std::stoi(tok) - 1;  // v/vt/vn records: leading index
            }
            mesh.triangles.push_back(t);
        }
    }
    return mesh;
}

std::vector<Vec3> sample_mesh_points(const TriangleMesh& mesh, int count, uint64_t seed) {
    std::vector<double> cumulative(mesh.triangles.size());
    double total = 0.0;
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        const Vec3& v0 = mesh.vertices[t[0]];
        total += 0.5 * norm(cross(mesh.vertices[t[1]] - v0, mesh.vertices[t[2]] - v0));
        cumulative[i] = total;
    }
    std::vector<Vec3> points;
    points.reserve(count);
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const double target = rng.uniform() * total;
        const size_t tri = std::lower_bound(cumulative.begin(), cumulative.end(), target) -
                           cumulative.begin();
        const auto& t = mesh.triangles[std::min(tri, mesh.triangles.size() - 1)];
        double b0 = rng.uniform(), b1 = rng.uniform();
        if (b0 + b1 > 1.0) {
            b0 = 1.0 - b0;
            b1 = 1.0 - b1;
        }
        points.push_back(mesh.vertices[t[0]] +
                         b0 * (mesh.vertices[t[1]] - mesh.vertices[t[0]]) +
                         b1 * (mesh.vertices[t[2]] - mesh.vertices[t[0]]));
    }
    return points;
}

}  // namespace nemto
