#pragma once

#include <memory>
#include <span>
#include <string>

#include "nemto/vec3.hpp"

namespace nemto {

/// Signed distance field; negative inside, positive outside. Analytic kinds
/// return exact (or standard bound-exact) distances, learned fields whatever
/// their network currently outputs.
class SdfField {
public:
    virtual ~SdfField() = default;

    virtual double query(const Vec3& x) const = 0;

    /// Unnormalized gradient of the field at x.
    virtual Vec3 gradient(const Vec3& x) const = 0;

    /// Batched query; learned fields override this with a matrix path.
    virtual void query_many(std::span<const Vec3> xs, std::span<double> out) const {
        for (size_t i = 0; i < xs.size(); ++i) out[i] = query(xs[i]);
    }

    /// Sphere-trace step scaling; learned fields are not metric SDFs and
    /// march conservatively.
    virtual double step_relaxation() const { return 1.0; }

    const Aabb& bounding_box() const { return bbox_; }

    /// Unit outward normal; throws DegenerateGradient when the gradient norm
    /// is below 1e-8.
    Vec3 normal(const Vec3& x) const;

protected:
    Aabb bbox_;
};

/// Ray/surface intersection record.
struct SurfaceHit {
    bool hit = false;
    double t = 0.0;
    Vec3 x;
    Vec3 n;
};

std::shared_ptr<SdfField> make_sphere_sdf(const Vec3& center, double radius);
std::shared_ptr<SdfField> make_box_sdf(const Vec3& center, const Vec3& half_extents);
std::shared_ptr<SdfField> make_torus_sdf(const Vec3& center, double major_radius,
                                         double minor_radius);

enum class CsgOp { Union, Intersection, Difference };
std::shared_ptr<SdfField> make_csg_sdf(CsgOp op, std::shared_ptr<SdfField> a,
                                       std::shared_ptr<SdfField> b);

/// Shape from a CLI spec: "sphere", "box", "torus" or "csg:<file.json>".
std::shared_ptr<SdfField> make_shape(const std::string& spec);

/// Marches the ray from its bounding-box entry; declares a hit when the field
/// drops below eps_hit = 1e-5 * box diagonal and refines the hit parameter by
/// bracketed secant/bisection. A miss is reported with hit = false.
SurfaceHit sphere_trace(const SdfField& field, const Ray& ray);

/// Exit intersection for a ray starting on/inside the surface. Marches on -f
/// after an initial offset of 2 eps_hit. Throws NoExit when the field never
/// lets the ray out (degenerate fields).
SurfaceHit inside_trace(const SdfField& field, const Ray& ray);

/// Lockstep batched variant of sphere_trace; per-ray results are identical to
/// the scalar routine, but learned fields get batched network queries.
void sphere_trace_batch(const SdfField& field, std::span<const Ray> rays,
                        std::span<SurfaceHit> hits);

}  // namespace nemto
