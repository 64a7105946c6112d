#include "nemto/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "nemto/errors.hpp"

namespace nemto {

namespace {
constexpr double kBoxMargin = 0.1;
constexpr int kMaxMarchSteps = 256;
constexpr int kRefineSteps = 8;
}  // namespace

Vec3 SdfField::normal(const Vec3& x) const {
    const Vec3 g = gradient(x);
    const double len = norm(g);
    if (len <= 1e-8) throw DegenerateGradient("sdf: gradient norm below 1e-8");
    return g / len;
}

namespace {

class SphereSdf final : public SdfField {
public:
    SphereSdf(const Vec3& center, double radius) : center_(center), radius_(radius) {
        bbox_.lo = center - Vec3(radius + kBoxMargin);
        bbox_.hi = center + Vec3(radius + kBoxMargin);
    }
    double query(const Vec3& x) const override { return norm(x - center_) - radius_; }
    Vec3 gradient(const Vec3& x) const override {
        const Vec3 d = x - center_;
        const double len = norm(d);
        if (len < 1e-12) return {0.0, 0.0, 0.0};
        return d / len;
    }

private:
    Vec3 center_;
    double radius_;
};

class BoxSdf final : public SdfField {
public:
    BoxSdf(const Vec3& center, const Vec3& he) : center_(center), he_(he) {
        bbox_.lo = center - he - Vec3(kBoxMargin);
        bbox_.hi = center + he + Vec3(kBoxMargin);
    }
    double query(const Vec3& x) const override {
        const Vec3 q = vabs(x - center_) - he_;
        const Vec3 outside = vmax(q, Vec3(0.0));
        return norm(outside) + std::min(max_component(q), 0.0);
    }
    Vec3 gradient(const Vec3& x) const override {
        const Vec3 d = x - center_;
        const Vec3 q = vabs(d) - he_;
        const Vec3 outside = vmax(q, Vec3(0.0));
        const double out_len = norm(outside);
        Vec3 g{0.0, 0.0, 0.0};
        if (out_len > 1e-12) {
            for (int a = 0; a < 3; ++a)
                g[a] = outside[a] / out_len * (d[a] < 0.0 ? -1.0 : 1.0);
        } else {
            int axis = 0;
            for (int a = 1; a < 3; ++a)
                if (q[a] > q[axis]) axis = a;
            g[axis] = d[axis] < 0.0 ? -1.0 : 1.0;
        }
        return g;
    }

private:
    Vec3 center_, he_;
};

// Ring lies in the xy-plane (torus axis = z).
class TorusSdf final : public SdfField {
public:
    TorusSdf(const Vec3& center, double major, double minor)
        : center_(center), major_(major), minor_(minor) {
        const double rxy = major + minor + kBoxMargin;
        bbox_.lo = center - Vec3(rxy, rxy, minor + kBoxMargin);
        bbox_.hi = center + Vec3(rxy, rxy, minor + kBoxMargin);
    }
    double query(const Vec3& x) const override {
        const Vec3 d = x - center_;
        const double ring = std::sqrt(d.x * d.x + d.y * d.y) - major_;
        return std::sqrt(ring * ring + d.z * d.z) - minor_;
    }
    Vec3 gradient(const Vec3& x) const override {
        const Vec3 d = x - center_;
        const double rho = std::sqrt(d.x * d.x + d.y * d.y);
        if (rho < 1e-12) return {0.0, 0.0, d.z < 0.0 ? -1.0 : 1.0};
        const double ring = rho - major_;
        const double qlen = std::sqrt(ring * ring + d.z * d.z);
        if (qlen < 1e-12) return {0.0, 0.0, 0.0};
        const double dr = ring / qlen;
        return {dr * d.x / rho, dr * d.y / rho, d.z / qlen};
    }

private:
    Vec3 center_;
    double major_, minor_;
};

class CsgSdf final : public SdfField {
public:
    CsgSdf(CsgOp op, std::shared_ptr<SdfField> a, std::shared_ptr<SdfField> b)
        : op_(op), a_(std::move(a)), b_(std::move(b)) {
        const Aabb& ba = a_->bounding_box();
        const Aabb& bb = b_->bounding_box();
        switch (op_) {
            case CsgOp::Union:
                bbox_.lo = vmin(ba.lo, bb.lo);
                bbox_.hi = vmax(ba.hi, bb.hi);
                break;
            case CsgOp::Intersection:
                bbox_.lo = vmax(ba.lo, bb.lo);
                bbox_.hi = vmin(ba.hi, bb.hi);
                bbox_.lo = vmin(bbox_.lo, bbox_.hi);  // guard disjoint operands
                break;
            case CsgOp::Difference:
                bbox_ = ba;
                break;
        }
    }
    double query(const Vec3& x) const override {
        const double fa = a_->query(x);
        const double fb = b_->query(x);
        switch (op_) {
            case CsgOp::Union: return std::min(fa, fb);
            case CsgOp::Intersection: return std::max(fa, fb);
            case CsgOp::Difference: return std::max(fa, -fb);
        }
        return fa;
    }
    Vec3 gradient(const Vec3& x) const override {
        const double fa = a_->query(x);
        const double fb = b_->query(x);
        switch (op_) {
            case CsgOp::Union: return fa <= fb ? a_->gradient(x) : b_->gradient(x);
            case CsgOp::Intersection: return fa >= fb ? a_->gradient(x) : b_->gradient(x);
            case CsgOp::Difference:
                return fa >= -fb ? a_->gradient(x) : -1.0 * b_->gradient(x);
        }
        return a_->gradient(x);
    }

private:
    CsgOp op_;
    std::shared_ptr<SdfField> a_, b_;
};

}  // namespace

std::shared_ptr<SdfField> make_sphere_sdf(const Vec3& center, double radius) {
    return std::make_shared<SphereSdf>(center, radius);
}

std::shared_ptr<SdfField> make_box_sdf(const Vec3& center, const Vec3& half_extents) {
    return std::make_shared<BoxSdf>(center, half_extents);
}

std::shared_ptr<SdfField> make_torus_sdf(const Vec3& center, double major_radius,
                                         double minor_radius) {
    return std::make_shared<TorusSdf>(center, major_radius, minor_radius);
}

std::shared_ptr<SdfField> make_csg_sdf(CsgOp op, std::shared_ptr<SdfField> a,
                                       std::shared_ptr<SdfField> b) {
    return std::make_shared<CsgSdf>(op, std::move(a), std::move(b));
}

namespace {

Vec3 parse_vec3(const nlohmann::json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

std::shared_ptr<SdfField> parse_csg_node(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sphere")
        return make_sphere_sdf(parse_vec3(j, "center", Vec3(0.0)),
                               j.value("radius", 1.0));
    if (kind == "box")
        return make_box_sdf(parse_vec3(j, "center", Vec3(0.0)),
                            parse_vec3(j, "half_extents", Vec3{0.8, 0.8, 0.8}));
    if (kind == "torus")
        return make_torus_sdf(parse_vec3(j, "center", Vec3(0.0)),
                              j.value("major_radius", 0.7), j.value("minor_radius", 0.25));
    CsgOp op;
    if (kind == "union")
        op = CsgOp::Union;
    else if (kind == "intersection")
        op = CsgOp::Intersection;
    else if (kind == "difference")
        op = CsgOp::Difference;
    else
        throw IoError("csg: unknown node kind '" + kind + "'");
    return make_csg_sdf(op, parse_csg_node(j.at("a")), parse_csg_node(j.at("b")));
}

}  // namespace

std::shared_ptr<SdfField> make_shape(const std::string& spec) {
    if (spec == "sphere") return make_sphere_sdf(Vec3(0.0), 1.0);
    if (spec == "box") return make_box_sdf(Vec3(0.0), Vec3{0.8, 0.8, 0.8});
    if (spec == "torus") return make_torus_sdf(Vec3(0.0), 0.7, 0.25);
    if (spec.rfind("csg:", 0) == 0) {
        const std::string path = spec.substr(4);
        std::ifstream in(path);
        if (!in) throw IoError("csg: cannot open " + path);
        nlohmann::json j;
        in >> j;
        return parse_csg_node(j);
    }
    throw IoError("unknown shape '" + spec + "' (expected sphere|box|torus|csg:<file>)");
}

// ---------------------------------------------------------------------------
// Sphere tracing
// ---------------------------------------------------------------------------

namespace {

// Bracketed secant refinement of the crossing between (lo, flo >= 0) and
// (hi, fhi < 0); falls back to bisection when the secant leaves the bracket.
double refine_crossing(const SdfField& field, const Ray& ray, double lo, double flo,
                       double hi, double fhi, double sign = 1.0) {
    for (int i = 0; i < kRefineSteps; ++i) {
        double m = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
        const double fm = sign * field.query(ray.at(m));
        if (fm >= 0.0) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
            fhi = fm;
        }
    }
    return std::fabs(flo) <= std::fabs(fhi) ? lo : hi;
}

// Polishes a near-surface sample (t, 0 <= f < eps) toward the true crossing.
// Oblique approaches leave the crossing up to f / cos(angle) ahead, so walk
// forward with secant extrapolation until the sign flips, then bracket.
double polish_approach(const SdfField& field, const Ray& ray, double prev_t, double prev_f,
                       double t, double f, double eps, double t_far, double sign = 1.0) {
    double a_t = prev_t, a_f = prev_f;
    double b_t = t, b_f = f;
    if (!(a_f > b_f)) {  // no usable slope from the march; probe by the sdf bound
        a_t = b_t;
        a_f = b_f;
        b_t = b_t + std::max(b_f, 0.5 * eps);
        if (b_t > t_far) return t;
        b_f = sign * field.query(ray.at(b_t));
    }
    for (int i = 0; i < 2 * kRefineSteps; ++i) {
        if (b_f < 0.0) return refine_crossing(field, ray, a_t, a_f, b_t, b_f, sign);
        if (b_f <= 1e-7 * eps) return b_t;
        const double denom = a_f - b_f;
        double step = denom > 0.0 ? b_f * (b_t - a_t) / denom : b_f;
        step = std::clamp(step, 0.25 * eps, 1e4 * eps);
        const double n_t = b_t + step;
        if (n_t > t_far) return b_t;  // leaves the box while grazing
        const double n_f = sign * field.query(ray.at(n_t));
        if (n_f >= b_f && n_f >= 0.0) return b_t;  // tangential pass: keep the minimum
        a_t = b_t;
        a_f = b_f;
        b_t = n_t;
        b_f = n_f;
    }
    return b_t;
}

// Shared per-ray marching state for the scalar and lockstep batched paths.
struct MarchState {
    Ray ray;
    double t = 0.0;
    double t_far = 0.0;
    double prev_t = 0.0;
    double prev_f = -1.0;  // < 0 means "no previous sample yet"
    bool active = false;
    int index = 0;
};

// Handles one marching sample; returns true when the ray is finished (hit or
// miss written to out).
bool march_step(const SdfField& field, MarchState& s, double f, double eps, double relax,
                double max_step, SurfaceHit& out) {
    if (f < eps) {
        double t_hit;
        if (f < 0.0 && s.prev_f >= eps) {
            t_hit = refine_crossing(field, s.ray, s.prev_t, s.prev_f, s.t, f);
        } else if (f >= 0.0) {
            const bool have_prev = s.prev_f >= eps;
            t_hit = polish_approach(field, s.ray, have_prev ? s.prev_t : s.t,
                                    have_prev ? s.prev_f : f, s.t, f, eps, s.t_far);
        } else {
            t_hit = s.t;  // first sample already inside; nothing to bracket
        }
        out.hit = true;
        out.t = t_hit;
        out.x = s.ray.at(t_hit);
        out.n = field.normal(out.x);
        return true;
    }
    s.prev_t = s.t;
    s.prev_f = f;
    s.t += std::min(relax * f, max_step);
    if (s.t > s.t_far) {
        out.hit = false;
        return true;
    }
    return false;
}

}  // namespace

void sphere_trace_batch(const SdfField& field, std::span<const Ray> rays,
                        std::span<SurfaceHit> hits) {
    const Aabb& box = field.bounding_box();
    const double eps = 1e-5 * box.diagonal();
    const double relax = field.step_relaxation();
    const double max_step = box.diagonal();

    std::vector<MarchState> states;
    states.reserve(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) {
        hits[i] = SurfaceHit{};
        MarchState s;
        s.ray = rays[i];
        s.index = int(i);
        double t_near, t_far;
        if (!box.intersect(s.ray, t_near, t_far) || t_far < 0.0) continue;
        s.t = std::max(t_near, 0.0);
        s.t_far = t_far;
        s.active = true;
        states.push_back(s);
    }

    std::vector<Vec3> points;
    std::vector<double> values;
    for (int step = 0; step < kMaxMarchSteps && !states.empty(); ++step) {
        points.resize(states.size());
        values.resize(states.size());
        for (size_t i = 0; i < states.size(); ++i) points[i] = states[i].ray.at(states[i].t);
        field.query_many(points, values);
        size_t kept = 0;
        for (size_t i = 0; i < states.size(); ++i) {
            if (!march_step(field, states[i], values[i], eps, relax, max_step,
                            hits[states[i].index]))
                states[kept++] = states[i];
        }
        states.resize(kept);
    }
    // Anything still marching after the step budget is a miss.
    for (const MarchState& s : states) hits[s.index].hit = false;
}

SurfaceHit sphere_trace(const SdfField& field, const Ray& ray) {
    SurfaceHit hit;
    sphere_trace_batch(field, std::span<const Ray>(&ray, 1), std::span<SurfaceHit>(&hit, 1));
    return hit;
}

SurfaceHit inside_trace(const SdfField& field, const Ray& ray) {
    const Aabb& box = field.bounding_box();
    const double eps = 1e-5 * box.diagonal();
    const double relax = field.step_relaxation();
    const double max_step = box.diagonal();
    const double t_limit = 3.0 * box.diagonal();

    // March on g = -f: positive inside, crossing zero at the exit.
    auto g = [&](double t) { return -field.query(ray.at(t)); };
    auto finish = [&](double t) {
        SurfaceHit out;
        out.hit = true;
        out.t = t;
        out.x = ray.at(t);
        out.n = field.normal(out.x);
        return out;
    };

    double t = 2.0 * eps;
    double gt = g(t);
    // Tangential start: the offset already left the surface.
    if (gt < 0.0) return finish(t);

    double prev_t = t, prev_g = gt;
    for (int step = 0; step < kMaxMarchSteps; ++step) {
        // Minimum step keeps shallow chords moving; overshoot is caught by the
        // sign change and refined away.
        t += std::clamp(relax * gt, 0.5 * eps, max_step);
        if (t > t_limit) throw NoExit("inside_trace: ray never reached the surface");
        const double gn = g(t);
        if (gn < 0.0)
            return finish(refine_crossing(field, ray, prev_t, prev_g, t, gn, -1.0));
        if (gn < eps && gn < gt)  // approaching the surface from inside
            return finish(polish_approach(field, ray, prev_t, prev_g, t, gn, eps, t_limit, -1.0));
        prev_t = t;
        prev_g = gn;
        gt = gn;
    }
    throw NoExit("inside_trace: step budget exhausted");
}

}  // namespace nemto
