#pragma once

#include <cassert>
#include <cmath>
#include <optional>

#include "nemto/vec3.hpp"

// Closed-form smooth-dielectric optics shared by the oracle renderer, the
// losses and the learned renderer.
//
// Convention, fixed for the whole project: omega_i points AWAY from the
// surface toward the ray origin (omega_i = -ray.direction at a hit) and n is
// the outward unit normal on the incident side, so dot(omega_i, n) >= 0 at a
// valid front-facing hit.

namespace nemto::optics {

inline constexpr double kAirIor = 1.00028;

/// Indices of refraction on the incident / transmitting side of an interface.
struct IorPair {
    double eta_i = 1.0;
    double eta_t = 1.0;
};

/// Fresnel energy split; f_r + f_t == 1 by construction.
struct FresnelSplit {
    double f_r = 0.0;
    double f_t = 1.0;
};

/// Mirror direction: omega_r = 2 (n . omega_i) n - omega_i.
inline Vec3 reflect(const Vec3& omega_i, const Vec3& n) {
    assert(std::fabs(norm(omega_i) - 1.0) < 1e-6 && std::fabs(norm(n) - 1.0) < 1e-6);
    assert(dot(omega_i, n) >= -1e-9);
    return 2.0 * dot(n, omega_i) * n - omega_i;
}

/// Transmitted direction across the interface, pointing into the transmitting
/// medium (dot with n <= 0). nullopt signals total internal reflection.
inline std::optional<Vec3> refract(const Vec3& omega_i, const Vec3& n, const IorPair& ior) {
    assert(std::fabs(norm(omega_i) - 1.0) < 1e-6 && std::fabs(norm(n) - 1.0) < 1e-6);
    const double c = dot(omega_i, n);
    assert(c >= -1e-9);
    const double k = ior.eta_i / ior.eta_t;
    const double radicand = 1.0 - k * k * (1.0 - c * c);
    if (radicand < 0.0) return std::nullopt;
    return -k * (omega_i - c * n) - n * std::sqrt(radicand);
}

/// Unpolarized Fresnel reflectance from the incident-angle cosine.
/// nullopt signals total internal reflection (callers treat it as f_r = 1).
inline std::optional<FresnelSplit> fresnel_reflectance(double cos_beta_i, const IorPair& ior) {
    assert(cos_beta_i > 0.0 && cos_beta_i <= 1.0 + 1e-12);
    const double ci = std::min(cos_beta_i, 1.0);
    const double k = ior.eta_i / ior.eta_t;
    const double sin2_t = k * k * (1.0 - ci * ci);
    if (sin2_t > 1.0) return std::nullopt;
    const double ct = std::sqrt(1.0 - sin2_t);
    const double r_par = (ior.eta_t * ci - ior.eta_i * ct) / (ior.eta_t * ci + ior.eta_i * ct);
    const double r_perp = (ior.eta_i * ci - ior.eta_t * ct) / (ior.eta_i * ci + ior.eta_t * ct);
    const double f_r = 0.5 * (r_par * r_par + r_perp * r_perp);
    return FresnelSplit{f_r, 1.0 - f_r};
}

/// Two-direction radiance composition:
///   C = f_r * e_reflect + (eta_i^2 / eta_t^2) (1 - f_r) * e_transmit.
inline Rgb blend_radiance(double f_r, const IorPair& ior, const Rgb& e_reflect,
                          const Rgb& e_transmit) {
    assert(f_r >= 0.0 && f_r <= 1.0);
    const double compression = (ior.eta_i * ior.eta_i) / (ior.eta_t * ior.eta_t);
    return f_r * e_reflect + compression * (1.0 - f_r) * e_transmit;
}

/// Fresnel reflectance with partial derivatives w.r.t. the incident cosine and
/// the transmitting index. Used by the learned renderer where eta_t is a
/// network output and cos beta_i depends on the geometry normal.
struct FresnelGrad {
    double f_r = 1.0;
    double d_cos = 0.0;
    double d_eta_t = 0.0;
    bool tir = true;
};

inline FresnelGrad fresnel_reflectance_grad(double cos_beta_i, const IorPair& ior) {
    FresnelGrad out;
    const double ci = std::min(cos_beta_i, 1.0);
    const double ei = ior.eta_i, et = ior.eta_t;
    const double k = ei / et;
    const double s2 = 1.0 - ci * ci;
    const double sin2_t = k * k * s2;
    if (sin2_t > 1.0) return out;  // TIR: f_r pinned to 1, flat gradient
    const double ct = std::sqrt(std::max(1.0 - sin2_t, 1e-300));
    const double dct_dci = k * k * ci / ct;
    const double dct_det = k * k * s2 / (et * ct);

    const double A = et * ci - ei * ct, B = et * ci + ei * ct;
    const double C = ei * ci - et * ct, D = ei * ci + et * ct;
    const double r_par = A / B, r_perp = C / D;

    const double dA_dci = et - ei * dct_dci, dB_dci = et + ei * dct_dci;
    const double dC_dci = ei - et * dct_dci, dD_dci = ei + et * dct_dci;
    const double dA_det = ci - ei * dct_det, dB_det = ci + ei * dct_det;
    const double dC_det = -ct - et * dct_det, dD_det = ct + et * dct_det;

    const double drp_dci = (dA_dci * B - A * dB_dci) / (B * B);
    const double drs_dci = (dC_dci * D - C * dD_dci) / (D * D);
    const double drp_det = (dA_det * B - A * dB_det) / (B * B);
    const double drs_det = (dC_det * D - C * dD_det) / (D * D);

    out.f_r = 0.5 * (r_par * r_par + r_perp * r_perp);
    out.d_cos = r_par * drp_dci + r_perp * drs_dci;
    out.d_eta_t = r_par * drp_det + r_perp * drs_det;
    out.tir = false;
    return out;
}

}  // namespace nemto::optics
