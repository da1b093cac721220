#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sp2iso/connection.hpp"
#include "sp2iso/field_calculus.hpp"
#include "sp2iso/sp2.hpp"

namespace sp2iso {

/// F(Q) = Re(a), the real part of the upper-left entry. Its regular level sets
/// are parallel hypersurfaces of Sp(2) under the uniform metric; the machinery
/// below provides their closed-form first and second fundamental data.
inline double F_eval(const Sp2Element& q) { return re(q.a()); }

/// Closed-form metric gradient of F for any diagonal weights: the
/// left-trivialized components are (-Im(a)/wx, -b/wy, 0).
inline Sp2Tangent grad_F_closed(const Sp2Element& q, const MetricWeights& w = {}) {
    require_valid(w);
    const Quaternion gx = -im(q.a()) * (1.0 / w.wx);
    const Quaternion gy = -q.b() * (1.0 / w.wy);
    return {q, Sp2Algebra{gx, gy, Quaternion::zero()}};
}

/// |grad F|^2 in closed form: |Im a|^2/wx + |b|^2/wy.
inline double grad_F_norm2_closed(const Sp2Element& q, const MetricWeights& w = {}) {
    require_valid(w);
    return norm2(im(q.a())) / w.wx + norm2(q.b()) / w.wy;
}

/// F as a ScalarField, optionally carrying the closed-form gradient. With
/// with_closed_gradient = false every numeric path falls back to finite
/// differences, which is what the oracle comparisons exercise.
inline ScalarField F_scalar_field(bool with_closed_gradient = true) {
    ScalarField f;
    f.value = [](const Sp2Element& q) { return F_eval(q); };
    if (with_closed_gradient)
        f.gradient = [](const Sp2Element& q, const MetricWeights& w) {
            return grad_F_closed(q, w);
        };
    return f;
}

/// Hessian of F under the uniform metric, as the algebra element h(xi) with
/// H_F(xi, eta) = <h(xi), eta>. Components: -(F x, F y + b z, Im(conj(b) y)).
inline Sp2Algebra hessian_F_operator(const Sp2Element& q, const Sp2Algebra& xi) {
    const double t = F_eval(q);
    const Quaternion hx = xi.x * (-t);
    const Quaternion hy = -(xi.y * t + q.b() * xi.z);
    const Quaternion hz = -im(conj(q.b()) * xi.y);
    return {hx, hy, hz};
}

/// Closed-form Hessian H_F(u, v) at the common base point of u and v.
/// Specific to the uniform metric (weights (1,1,1)).
inline double hessian_F_closed(const Sp2Element& q, const Sp2Tangent& u, const Sp2Tangent& v) {
    if (frobenius_dist(u.base, q) > 1e-8 || frobenius_dist(v.base, q) > 1e-8)
        throw std::domain_error("hessian_F_closed: tangents not based at q");
    return inner(hessian_F_operator(q, u.xi), v.xi);
}

/// Metric trace of the closed-form Hessian over the orthonormal algebra basis.
inline double hessian_F_trace(const Sp2Element& q) {
    double tr = 0.0;
    for (const Sp2Algebra& e : orthonormal_basis())
        tr += inner(hessian_F_operator(q, e), e);
    return tr;
}

/// Principal-curvature data of the level hypersurface through a regular point,
/// oriented by nu = +grad F / |grad F|.
struct SpectrumResult {
    std::vector<std::pair<double, int>> eigenvalues;  ///< (value, multiplicity), summing to 9
    double t = 0.0;                                   ///< level value F(Q)
    double b_norm = 0.0;                              ///< |b| at the point
    bool degenerate_branch = false;                   ///< true when |b| <= 1e-8
    double crosscheck_residual = 0.0;                 ///< closed form vs. eigensolve
};

namespace detail {

/// Orthonormal basis (uniform metric) of the orthogonal complement of the unit
/// vector nu inside sp(2): Gram-Schmidt of the projected standard basis.
inline std::vector<Sp2Algebra> level_tangent_basis(const Sp2Algebra& nu) {
    std::vector<Sp2Algebra> basis;
    for (const Sp2Algebra& e : orthonormal_basis()) {
        Sp2Algebra v = e - nu * inner(e, nu);
        for (const Sp2Algebra& b : basis) v = v - b * inner(v, b);
        const double n = norm(v);
        if (n > 1e-6) basis.push_back(v * (1.0 / n));
    }
    if (basis.size() != 9)
        throw std::runtime_error("level_tangent_basis: projection rank is not 9");
    return basis;
}

}  // namespace detail

/// Spectrum of the shape operator A_nu = -H_F/|grad F| restricted to the level
/// hypersurface: closed form { t/s, (t +- sqrt(t^2+4|b|^2))/(2s) } with
/// s = sqrt(1-t^2), each of multiplicity 3, degenerating to multiplicities
/// (6, 3) with eigenvalue 0 on the |b| = 0 stratum. The closed values are
/// cross-checked against a symmetric eigensolve of the restricted operator and
/// the call fails if they disagree beyond 1e-8.
inline SpectrumResult shape_spectrum(const Sp2Element& q) {
    SpectrumResult res;
    res.t = F_eval(q);
    res.b_norm = norm(q.b());
    if (std::abs(res.t) >= 1.0 - 1e-8)
        throw std::domain_error("shape_spectrum: focal point (|F| >= 1 - 1e-8)");
    const double s = std::sqrt(1.0 - res.t * res.t);

    res.degenerate_branch = res.b_norm <= 1e-8;
    if (res.degenerate_branch) {
        res.eigenvalues = {{res.t / s, 6}, {0.0, 3}};
    } else {
        const double disc = std::sqrt(res.t * res.t + 4.0 * res.b_norm * res.b_norm);
        res.eigenvalues = {{res.t / s, 3}, {(res.t + disc) / (2.0 * s), 3},
                           {(res.t - disc) / (2.0 * s), 3}};
    }

    const double gn = std::sqrt(grad_F_norm2_closed(q));
    const Sp2Algebra nu = grad_F_closed(q).xi * (1.0 / gn);
    const std::vector<Sp2Algebra> basis = detail::level_tangent_basis(nu);
    Eigen::Matrix<double, 9, 9> a;
    for (int i = 0; i < 9; ++i) {
        const Sp2Algebra hi = hessian_F_operator(q, basis[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 9; ++j)
            a(i, j) = -inner(hi, basis[static_cast<std::size_t>(j)]) / gn;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> solver(
        (a + a.transpose()) * 0.5);
    std::vector<double> numeric(solver.eigenvalues().data(), solver.eigenvalues().data() + 9);
    std::vector<double> closed;
    for (const auto& [value, mult] : res.eigenvalues)
        closed.insert(closed.end(), static_cast<std::size_t>(mult), value);
    std::sort(closed.begin(), closed.end());
    for (int i = 0; i < 9; ++i)
        res.crosscheck_residual =
            std::max(res.crosscheck_residual, std::abs(closed[static_cast<std::size_t>(i)] -
                                                       numeric[static_cast<std::size_t>(i)]));
    if (res.crosscheck_residual > 1e-8)
        throw std::runtime_error("shape_spectrum: closed form and eigensolve disagree ("
                                 + std::to_string(res.crosscheck_residual) + ")");
    return res;
}

/// Basis of the principal-curvature eigenspace T_1, T_2 or T_3 at a regular
/// point with |b| > 1e-8. T_1 vectors are (x, Re(a x) b / |b|^2, 0) for
/// x in {i, j, k}; T_2/T_3 vectors are (0, b u, c u) for u in {i, j, k} with
/// c = |b|^2 / lambda', lambda' the corresponding root of l^2 - t l - |b|^2.
inline std::array<Sp2Tangent, 3> eigenspace_basis(const Sp2Element& q, int which) {
    const double t = F_eval(q);
    if (std::abs(t) >= 1.0 - 1e-8)
        throw std::domain_error("eigenspace_basis: focal point");
    const double bn = norm(q.b());
    if (bn <= 1e-8)
        throw std::domain_error("eigenspace_basis: eigenspaces merge at |b| = 0");
    if (which < 1 || which > 3) throw std::domain_error("eigenspace_basis: which must be 1..3");

    const std::array<Quaternion, 3> units = {Quaternion::i(), Quaternion::j(), Quaternion::k()};
    std::array<Sp2Tangent, 3> out;
    if (which == 1) {
        for (std::size_t n = 0; n < 3; ++n) {
            const Quaternion x = units[n];
            const Quaternion y = q.b() * (re(q.a() * x) / (bn * bn));
            Sp2Algebra v{x, y, Quaternion::zero()};
            out[n] = {q, v * (1.0 / norm(v))};
        }
        return out;
    }
    // Roots of l^2 - t l - |b|^2 = 0; the larger-magnitude one is computed
    // directly and the other through the product -|b|^2 to avoid cancellation.
    const double disc = std::sqrt(t * t + 4.0 * bn * bn);
    const double big = (t >= 0.0) ? (t + disc) / 2.0 : (t - disc) / 2.0;
    const double small = -(bn * bn) / big;
    const double lp = (t >= 0.0) ? big : small;   // root (t + disc)/2
    const double lm = (t >= 0.0) ? small : big;   // root (t - disc)/2
    const double c = (which == 2) ? (bn * bn) / lp : (bn * bn) / lm;
    for (std::size_t n = 0; n < 3; ++n) {
        const Quaternion u = units[n];
        Sp2Algebra v{Quaternion::zero(), q.b() * u, u * c};
        out[n] = {q, v * (1.0 / norm(v))};
    }
    return out;
}

/// Classification of a point against the focal varieties F = +-1, which are
/// the sets {diag(+-1, d) : |d| = 1}.
enum class FocalClass { Minus, Regular, Plus };

/// Classifies q as focal (|F -+ 1| < 1e-8) or regular. For focal points the
/// matrix structure diag(+-1, d) is asserted: off-diagonal entries below 1e-6
/// and |d| = 1 within 1e-6, else std::runtime_error.
inline FocalClass focal_membership(const Sp2Element& q) {
    const double t = F_eval(q);
    const int sign = (std::abs(t - 1.0) < 1e-8) ? 1 : (std::abs(t + 1.0) < 1e-8) ? -1 : 0;
    if (sign == 0) return FocalClass::Regular;
    const double structural =
        std::max({norm(q.b()), norm(q.c()), std::abs(norm(q.d()) - 1.0),
                  norm(q.a() - Quaternion::one() * static_cast<double>(sign))});
    if (structural > 1e-6)
        throw std::runtime_error("focal_membership: |F| = 1 but the point is not diag(+-1, d)");
    return sign > 0 ? FocalClass::Plus : FocalClass::Minus;
}

/// Outcome of tracing the unit normal geodesic until the focal variety.
struct NormalGeodesicTrace {
    double arc_length = 0.0;          ///< distance from the start to the focal variety
    Sp2Element endpoint;              ///< focal arrival point, of the form diag(+-1, d)
    Sp2Algebra end_velocity;          ///< left-trivialized velocity at arrival
    FocalClass focal = FocalClass::Regular;
    double sine_law_residual = 0.0;   ///< max |F(s) - sin(asin(t0) + sign s)| on the trace
    GeodesicPath path;                ///< dense states up to the last step before arrival
};

namespace detail {

inline double dF_along(const Mat2H& q, const Sp2Algebra& xi) {
    return re(mul(q, xi.matrix()).a);
}

}  // namespace detail

/// Integrates the geodesic with initial velocity sign * grad F / |grad F|
/// under the uniform metric. Because F is transnormal this geodesic is the
/// integral curve of the unit normal field, and it crosses the focal variety
/// where dF/ds vanishes; that crossing is located by bisection on a single
/// integrator step. F along the trace follows sin(asin(t0) + sign * s).
inline NormalGeodesicTrace normal_geodesic_trace(const Sp2Element& q0, int sign) {
    if (sign != 1 && sign != -1)
        throw std::domain_error("normal_geodesic_trace: sign must be +1 or -1");
    const double t0 = F_eval(q0);
    if (std::abs(t0) >= 1.0 - 1e-8)
        throw std::domain_error("normal_geodesic_trace: start point is focal");
    const MetricWeights w{};
    const double gn = std::sqrt(grad_F_norm2_closed(q0));
    const Sp2Algebra v0 = grad_F_closed(q0).xi * (static_cast<double>(sign) / gn);

    NormalGeodesicTrace out;
    out.path.s.push_back(0.0);
    out.path.point.push_back(q0);
    out.path.velocity.push_back(v0);

    const double h = 1e-3;
    const double theta0 = std::asin(t0);
    detail::GeodesicState prev{q0.matrix(), v0};
    double s_prev = 0.0;
    while (true) {
        const detail::GeodesicState next = detail::geodesic_rk4_step(prev, h, w);
        const double g_next = detail::dF_along(next.q, next.xi) * static_cast<double>(sign);
        if (g_next <= 0.0) break;
        prev = next;
        s_prev += h;
        out.path.s.push_back(s_prev);
        out.path.point.push_back(Sp2Element(prev.q));
        out.path.velocity.push_back(prev.xi);
        const double predicted = std::sin(theta0 + static_cast<double>(sign) * s_prev);
        out.sine_law_residual =
            std::max(out.sine_law_residual, std::abs(re(prev.q.a) - predicted));
        if (s_prev > 4.0)
            throw std::runtime_error("normal_geodesic_trace: focal crossing not found");
    }

    // Bisection in the step size tau of a single RK4 step from the last state
    // with positive directional derivative.
    double lo = 0.0, hi = h;
    for (int iter = 0; iter < 80 && (hi - lo) > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const detail::GeodesicState trial = detail::geodesic_rk4_step(prev, mid, w);
        const double g = detail::dF_along(trial.q, trial.xi) * static_cast<double>(sign);
        if (g > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double tau = 0.5 * (lo + hi);
    const detail::GeodesicState at = detail::geodesic_rk4_step(prev, tau, w);
    out.arc_length = s_prev + tau;
    out.endpoint = Sp2Element(at.q);
    out.end_velocity = at.xi;
    out.focal = focal_membership(out.endpoint);
    const double predicted = std::sin(theta0 + static_cast<double>(sign) * out.arc_length);
    out.sine_law_residual =
        std::max(out.sine_law_residual, std::abs(F_eval(out.endpoint) - predicted));
    if (out.focal == FocalClass::Regular)
        throw std::runtime_error("normal_geodesic_trace: arrival point is not focal");
    return out;
}

/// Transports q along the normal geodesic flow to the level F = target. The
/// arc length is |asin(target) - asin(F(q))| by the sine law, applied in up to
/// five correction rounds until |F - target| <= tol.
inline Sp2Element flow_to_level(const Sp2Element& q, double target = 0.0, double tol = 1e-12) {
    if (std::abs(target) >= 1.0)
        throw std::domain_error("flow_to_level: target level must be interior");
    Sp2Element at = q;
    for (int round = 0; round < 5; ++round) {
        const double t = F_eval(at);
        if (std::abs(t - target) <= tol) return at;
        if (std::abs(t) >= 1.0 - 1e-12)
            throw std::domain_error("flow_to_level: start point is focal");
        const double arc = std::asin(target) - std::asin(t);
        const double gn = std::sqrt(grad_F_norm2_closed(at));
        const Sp2Algebra v0 = grad_F_closed(at).xi * ((arc >= 0.0 ? 1.0 : -1.0) / gn);
        at = geodesic_integrate(at, v0, std::abs(arc)).end();
    }
    if (std::abs(F_eval(at) - target) > tol)
        throw std::runtime_error("flow_to_level: did not converge to the target level");
    return at;
}

}  // namespace sp2iso
