#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "sp2iso/connection.hpp"
#include "sp2iso/sp2.hpp"
#include "sp2iso/transnormal.hpp"

namespace sp2iso {

/// The free S^3-action whose quotient Sp(2)/S^3 is the exotic 7-sphere:
/// Q maps to diag(q, 1) Q diag(conj q, conj q). F = Re(a) is invariant, so it
/// descends to the quotient; all quotient quantities below are computed on
/// invariant representatives upstairs.
inline Sp2Element s3_act(const Quaternion& q, const Sp2Element& m) {
    if (std::abs(norm(q) - 1.0) > 1e-9) throw std::domain_error("s3_act: q must be unit");
    const Quaternion qc = conj(q);
    return Sp2Element({q * m.a() * qc, q * m.b() * qc, m.c() * qc, m.d() * qc});
}

/// Differential of the action diffeomorphism: the left-trivialized components
/// conjugate slotwise, so the action is an isometry of every diagonal metric.
inline Sp2Tangent s3_act_pushforward(const Quaternion& q, const Sp2Tangent& v) {
    const Quaternion qc = conj(q);
    const Sp2Algebra xi{q * v.xi.x * qc, q * v.xi.y * qc, q * v.xi.z * qc};
    return {s3_act(q, v.base), xi};
}

/// Left-trivialized direction of the orbit curve s -> s3_act(exp(s x), Q) at
/// s = 0, for imaginary x: components (conj(a)xa - x, conj(a)xb, conj(b)xb - x).
inline Sp2Algebra orbit_direction(const Sp2Element& m, const Quaternion& x) {
    const Quaternion ac = conj(m.a());
    const Quaternion bc = conj(m.b());
    return {ac * x * m.a() - x, ac * x * m.b(), bc * x * m.b() - x};
}

/// Orbit tangent frame nu(i), nu(j), nu(k). Each member is orthogonal to
/// grad F, which makes grad F horizontal for the quotient submersion.
struct OrbitFrame {
    std::array<Sp2Tangent, 3> nu;
};

inline OrbitFrame orbit_frame(const Sp2Element& m) {
    return {{Sp2Tangent{m, orbit_direction(m, Quaternion::i())},
             Sp2Tangent{m, orbit_direction(m, Quaternion::j())},
             Sp2Tangent{m, orbit_direction(m, Quaternion::k())}}};
}

namespace detail {

/// Unit quaternion rotating the unit imaginary u onto the unit imaginary v.
inline Quaternion rotation_between(const Quaternion& u, const Quaternion& v) {
    const Quaternion w = Quaternion::one() - v * u;
    if (norm(w) > 1e-7) return normalized(w);
    // Antipodal pair: rotate by pi about any axis orthogonal to u.
    const Quaternion seed = std::abs(u.x) < 0.9 ? Quaternion::i() : Quaternion::j();
    return normalized(seed - u * dot(seed, u));
}

}  // namespace detail

/// Conjugation data bringing an orbit to its normal form: q b conj(q) lands in
/// span{1, i} with non-negative i component, q a conj(q) in span{1, i, j} with
/// non-negative j component.
struct NormalForm {
    Quaternion q;
    Quaternion a;
    Quaternion b;
};

/// Two-stage construction: first rotate Im(b) onto the i-axis, then use the
/// residual stabilizer (rotations about i) to clear the k component of a.
/// When Im(b) vanishes the full group stabilizes b and Im(a) is rotated onto
/// the i-axis instead.
inline NormalForm normal_form(const Quaternion& a, const Quaternion& b) {
    Quaternion q = Quaternion::one();
    const Quaternion vb = im(b);
    const double nb = norm(vb);
    if (nb > 1e-14) {
        q = detail::rotation_between(vb / nb, Quaternion::i());
        const Quaternion a1 = q * a * conj(q);
        // Residual rotations cos t + i sin t turn the (j, k)-plane by 2t.
        const double r = std::hypot(a1.y, a1.z);
        if (r > 1e-300) {
            const double t = -0.5 * std::atan2(a1.z, a1.y);
            q = Quaternion{std::cos(t), std::sin(t), 0.0, 0.0} * q;
        }
    } else {
        const Quaternion va = im(a);
        const double na = norm(va);
        if (na > 1e-14) q = detail::rotation_between(va / na, Quaternion::i());
    }
    return {q, q * a * conj(q), q * b * conj(q)};
}

/// A point of the quotient, stored as the normalized upstairs representative.
struct OrbitPoint {
    Sp2Element representative;
    bool normalized = false;

    OrbitPoint() = default;
    explicit OrbitPoint(const Sp2Element& m)
        : representative(s3_act(normal_form(m.a(), m.b()).q, m)), normalized(true) {}
};

/// Quotient equality: after normalization the remaining gauge freedom is the
/// circle cos t + i sin t together with sign flips realized by j; the distance
/// is minimized over a 720-point grid of each family plus local refinement.
inline bool orbit_equal(const OrbitPoint& p, const OrbitPoint& r, double tol = 1e-8) {
    if (!p.normalized || !r.normalized) throw std::domain_error("orbit_equal: normalize first");
    const auto dist_at = [&](double theta, bool flip) {
        Quaternion q{std::cos(theta), std::sin(theta), 0.0, 0.0};
        if (flip) q = Quaternion::j() * q;
        return frobenius_dist(s3_act(q, p.representative), r.representative);
    };
    const int grid = 720;
    double best = dist_at(0.0, false);
    double best_theta = 0.0;
    bool best_flip = false;
    for (int flip = 0; flip < 2; ++flip) {
        for (int n = 0; n < grid; ++n) {
            const double theta = 2.0 * std::numbers::pi * n / grid;
            const double d = dist_at(theta, flip == 1);
            if (d < best) {
                best = d;
                best_theta = theta;
                best_flip = flip == 1;
            }
        }
    }
    double lo = best_theta - 2.0 * std::numbers::pi / grid;
    double hi = best_theta + 2.0 * std::numbers::pi / grid;
    for (int iter = 0; iter < 60; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (dist_at(m1, best_flip) < dist_at(m2, best_flip)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best = std::min(best, dist_at(0.5 * (lo + hi), best_flip));
    return best <= tol;
}

/// Gram data of the orbit frame: the matrix g_ab = <nu_a, nu_b>, its inverse,
/// the minors E = g11 g22 - g12^2 and F_scalar = g33, and the spectral
/// condition number.
struct GramData {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d inverse = Eigen::Matrix3d::Zero();
    double e = 0.0;
    double f_scalar = 0.0;
    double condition = 0.0;
};

namespace detail {

inline GramData finish_gram(GramData gd) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(gd.g);
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    gd.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0) || gd.condition > 1e8)
        throw std::runtime_error("gram matrix is singular; condition number " +
                                 std::to_string(gd.condition));
    gd.inverse = gd.g.inverse();
    gd.e = gd.g(0, 0) * gd.g(1, 1) - gd.g(0, 1) * gd.g(0, 1);
    gd.f_scalar = gd.g(2, 2);
    return gd;
}

}  // namespace detail

/// Gram data by direct inner products of the orbit frame; valid at any point
/// with a three-dimensional orbit.
inline GramData gram_matrix(const Sp2Element& m) {
    const OrbitFrame fr = orbit_frame(m);
    GramData gd;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            gd.g(a, b) = inner(fr.nu[static_cast<std::size_t>(a)].xi,
                               fr.nu[static_cast<std::size_t>(b)].xi);
    return detail::finish_gram(gd);
}

/// Closed-form Gram data at a normal-form point of the zero level, written in
/// the coordinates a = a1 i + a2 j, b = b0 + b1 i with unit row norm:
/// with P = 1 - |a|^2 |b|^2,
///   g11 = P + 4 a2^2, g22 = P + 4(a1^2 + b1^2), g33 = P + 4(a1^2 + a2^2 + b1^2),
///   g12 = -4 a1 a2, all other off-diagonal entries zero.
inline GramData gram_closed(double a1, double a2, double b0, double b1) {
    const double p = 1.0 - (a1 * a1 + a2 * a2) * (b0 * b0 + b1 * b1);
    GramData gd;
    gd.g(0, 0) = p + 4.0 * a2 * a2;
    gd.g(1, 1) = p + 4.0 * (a1 * a1 + b1 * b1);
    gd.g(2, 2) = p + 4.0 * (a1 * a1 + a2 * a2 + b1 * b1);
    gd.g(0, 1) = gd.g(1, 0) = -4.0 * a1 * a2;
    return detail::finish_gram(gd);
}

/// Orbit-average term of the quotient Laplacian via the Hessian identity
/// Phi = -sum g^{ab} H_F(nu_a, nu_b), which needs no derivatives of the frame.
/// S^3-invariant along orbits.
inline double phi_numeric(const Sp2Element& m) {
    const OrbitFrame fr = orbit_frame(m);
    const GramData gd = gram_matrix(m);
    double acc = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            acc += gd.inverse(a, b) * hessian_F_closed(m, fr.nu[static_cast<std::size_t>(a)],
                                                       fr.nu[static_cast<std::size_t>(b)]);
    return -acc;
}

/// The same quantity from its definition Phi = sum g^{ab} <nabla_{nu_a} nu_b,
/// grad F>, with the covariant derivatives of the frame taken by central
/// differences along orbit-tangent curves. Slower; serves as the independent
/// cross-check of phi_numeric.
inline double phi_frame_derivative(const Sp2Element& m, double h = 1e-5) {
    const OrbitFrame fr = orbit_frame(m);
    const GramData gd = gram_matrix(m);
    const Sp2Tangent grad = grad_F_closed(m);
    const std::array<Quaternion, 3> units = {Quaternion::i(), Quaternion::j(), Quaternion::k()};
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
        const Sp2Algebra va = fr.nu[static_cast<std::size_t>(a)].xi;
        const auto curve = [&](double s) {
            return Sp2Element(mul(m.matrix(), expm(va.matrix() * s)));
        };
        for (int b = 0; b < 3; ++b) {
            const Quaternion xb = units[static_cast<std::size_t>(b)];
            const auto field = [&](double s) {
                const Sp2Element at = curve(s);
                return Sp2Tangent{at, orbit_direction(at, xb)};
            };
            const Sp2Tangent cov = covariant_derivative_along(field, curve, 0.0, va, {}, h);
            acc += gd.inverse(a, b) * inner(cov.xi, grad.xi);
        }
    }
    return acc;
}

/// Laplacian of the induced function f on the quotient at the orbit of m:
/// -7 f + Phi. The correction term Phi varies along the zero level, which is
/// exactly why f fails to be isoparametric downstairs.
inline double quotient_laplacian(const Sp2Element& m) {
    return -7.0 * F_eval(m) + phi_numeric(m);
}

/// Mean curvature (shape-operator trace) of the quotient level hypersurface
/// through m, oriented by the unit gradient: (6 f - Phi) / sqrt(1 - f^2).
/// On the zero level this reduces to -Phi, and its variation there exhibits
/// regular levels of non-constant mean curvature.
inline double mean_curvature_gm(const Sp2Element& m) {
    const double f = F_eval(m);
    if (std::abs(f) >= 1.0 - 1e-6) throw std::domain_error("mean_curvature_gm: near-focal point");
    return (6.0 * f - phi_numeric(m)) / std::sqrt(1.0 - f * f);
}

/// Normal-form zero-level point drawn uniformly from the parameter sphere
/// a = a1 i + a2 j, b = b0 + b1 i, a1^2 + a2^2 + b0^2 + b1^2 = 1.
struct ZeroLevelPoint {
    double a1 = 0.0, a2 = 0.0, b0 = 0.0, b1 = 0.0;
    Sp2Element q;
};

inline ZeroLevelPoint sample_zero_level_normal_form(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double v[4];
    double n = 0.0;
    do {
        for (double& c : v) c = gauss(rng);
        n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    } while (n < 1e-6);
    ZeroLevelPoint p;
    p.a1 = v[0] / n;
    p.a2 = v[1] / n;
    p.b0 = v[2] / n;
    p.b1 = v[3] / n;
    p.q = complete_row(Quaternion{0.0, p.a1, p.a2, 0.0}, Quaternion{p.b0, p.b1, 0.0, 0.0});
    return p;
}

/// Evaluates the closed zero-level expression for Phi:
///   phi = (8 a1 b1 b0 / (E F)) (E - 8 a2^2 b1^2),
/// with E, F_scalar from gram_closed. Odd under b0 -> -b0.
inline double phi_closed(double a1, double a2, double b0, double b1) {
    const double unit = a1 * a1 + a2 * a2 + b0 * b0 + b1 * b1;
    if (std::abs(unit - 1.0) > 1e-8)
        throw std::domain_error("phi_closed: coordinates must lie on the unit sphere");
    const GramData gd = gram_closed(a1, a2, b0, b1);
    const double ef = gd.e * gd.f_scalar;
    if (ef < 1e-12) throw std::domain_error("phi_closed: E*F below 1e-12");
    return (8.0 * a1 * b1 * b0 / ef) * (gd.e - 8.0 * a2 * a2 * b1 * b1);
}

}  // namespace sp2iso
