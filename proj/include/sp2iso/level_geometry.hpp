#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sp2iso/field_calculus.hpp"
#include "sp2iso/gromoll_meyer.hpp"
#include "sp2iso/transnormal.hpp"

namespace sp2iso {

/// Profile data (b, a) of a transnormal function: b(t) = |grad f|^2 and
/// a(t) = Laplacian f as functions of the value t. The domain is [alpha, beta]
/// with b positive inside and vanishing at finite focal endpoints.
struct LevelProfilePair {
    std::function<double(double)> b;
    std::function<double(double)> b_prime;
    std::function<double(double)> a;
    double alpha = -1.0;
    double beta = 1.0;
    bool alpha_finite = true;
    bool beta_finite = true;
    std::string label;
};

/// Mean curvature of the level hypersurface f^{-1}(t) with respect to the
/// unit normal grad f / |grad f|: h(t) = (b'(t) - 2 a(t)) / (2 sqrt(b(t))).
inline double mean_curvature_profile(const LevelProfilePair& p, double t) {
    const double bt = p.b(t);
    if (bt <= 0.0) throw std::domain_error("mean_curvature_profile: b(t) <= 0");
    return (p.b_prime(t) - 2.0 * p.a(t)) / (2.0 * std::sqrt(bt));
}

/// Locates the minimal regular level by bisecting b' - 2a. The numerator is
/// negative at alpha and positive at beta whenever both focal codimensions are
/// at least 2, so a root always exists in the proper case.
inline double minimal_level(const LevelProfilePair& p, int codim_minus, int codim_plus) {
    if (codim_minus < 2 || codim_plus < 2)
        throw std::domain_error("minimal_level: both focal codimensions must be >= 2");
    if (!p.alpha_finite || !p.beta_finite)
        throw std::domain_error("minimal_level: bisection needs finite endpoints");
    const auto numer = [&](double t) { return p.b_prime(t) - 2.0 * p.a(t); };
    double lo = p.alpha;
    double hi = p.beta;
    if (!(numer(lo) < 0.0) || !(numer(hi) > 0.0))
        throw std::runtime_error("minimal_level: endpoint sign bracket failed");
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (p.beta - p.alpha); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (numer(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Residuals of the focal-value identities a(alpha) = (1/2) b'(alpha) k_- and
/// a(beta) = (1/2) b'(beta) k_+, where k is the focal codimension.
inline std::pair<double, double> focal_codim_check(const LevelProfilePair& p, int codim_minus,
                                                   int codim_plus) {
    if (!p.alpha_finite || !p.beta_finite)
        throw std::domain_error("focal_codim_check: endpoints must be finite");
    const double lhs_minus = p.a(p.alpha) - 0.5 * p.b_prime(p.alpha) * codim_minus;
    const double lhs_plus = p.a(p.beta) - 0.5 * p.b_prime(p.beta) * codim_plus;
    return {std::abs(lhs_minus), std::abs(lhs_plus)};
}

/// Profile of F on Sp(2): b = 1 - t^2, a = -7 t on [-1, 1].
inline LevelProfilePair sp2_profile() {
    LevelProfilePair p;
    p.b = [](double t) { return 1.0 - t * t; };
    p.b_prime = [](double t) { return -2.0 * t; };
    p.a = [](double t) { return -7.0 * t; };
    p.alpha = -1.0;
    p.beta = 1.0;
    p.label = "sp2";
    return p;
}

/// Round sphere S^3 with f = x0^2: b = 4f - 4f^2, a = 2 - 8f on [0, 1].
/// Improper: the lower focal variety is an equator of codimension 1.
inline LevelProfilePair s3_profile() {
    LevelProfilePair p;
    p.b = [](double t) { return 4.0 * t - 4.0 * t * t; };
    p.b_prime = [](double t) { return 4.0 - 8.0 * t; };
    p.a = [](double t) { return 2.0 - 8.0 * t; };
    p.alpha = 0.0;
    p.beta = 1.0;
    p.label = "s3-example";
    return p;
}

namespace detail {

struct PhiTable {
    std::vector<double> t;
    std::vector<double> phi;

    double eval(double at) const {
        if (at <= t.front()) return phi.front();
        if (at >= t.back()) return phi.back();
        const auto it = std::upper_bound(t.begin(), t.end(), at);
        const std::size_t hi = static_cast<std::size_t>(it - t.begin());
        const std::size_t lo = hi - 1;
        const double span = t[hi] - t[lo];
        const double w = span > 0.0 ? (at - t[lo]) / span : 0.0;
        return (1.0 - w) * phi[lo] + w * phi[hi];
    }
};

/// Tabulates the orbit-average correction phi along the two normal geodesic
/// arcs through the witness zero-level point a = i/sqrt(2), b = (1+i)/2.
inline std::shared_ptr<const PhiTable> gm_witness_phi_table() {
    const double r = 1.0 / std::sqrt(2.0);
    const Sp2Element q0 = complete_row(Quaternion{0.0, r, 0.0, 0.0}, Quaternion{0.5, 0.5, 0.0, 0.0});
    std::vector<std::pair<double, double>> rows;
    for (const int sign : {-1, +1}) {
        const NormalGeodesicTrace trace = normal_geodesic_trace(q0, sign);
        for (const Sp2Element& m : trace.path.point)
            rows.emplace_back(F_eval(m), phi_numeric(m));
        rows.emplace_back(F_eval(trace.endpoint), phi_numeric(trace.endpoint));
    }
    std::sort(rows.begin(), rows.end());
    auto table = std::make_shared<PhiTable>();
    table->t.reserve(rows.size());
    table->phi.reserve(rows.size());
    for (const auto& [t, phi] : rows) {
        if (!table->t.empty() && t <= table->t.back()) continue;
        table->t.push_back(t);
        table->phi.push_back(phi);
    }
    return table;
}

}  // namespace detail

/// Profile of the induced function on the exotic quotient, along the normal
/// geodesic through the witness point: b = 1 - t^2 and a = -7 t + phi(t) with
/// phi interpolated from a dense table computed on the geodesic itself.
inline LevelProfilePair gm_profile() {
    const std::shared_ptr<const detail::PhiTable> table = detail::gm_witness_phi_table();
    LevelProfilePair p;
    p.b = [](double t) { return 1.0 - t * t; };
    p.b_prime = [](double t) { return -2.0 * t; };
    p.a = [table](double t) { return -7.0 * t + table->eval(t); };
    p.alpha = -1.0;
    p.beta = 1.0;
    p.label = "gromoll-meyer";
    return p;
}

/// Conformal change of metric by the factor e^{2u(f)}: the profile transforms
/// as b -> e^{-2u} b and a -> e^{-2u}((n-2) u' b + a), n the manifold
/// dimension. Zeros of b are preserved exactly, so the focal varieties of the
/// deformed metric coincide with the original ones.
inline LevelProfilePair conformal_deform(const LevelProfilePair& p,
                                         const std::function<double(double)>& u,
                                         const std::function<double(double)>& u_prime, int n) {
    if (n < 2) throw std::domain_error("conformal_deform: dimension must be >= 2");
    LevelProfilePair out = p;
    out.b = [p, u](double t) { return std::exp(-2.0 * u(t)) * p.b(t); };
    out.b_prime = [p, u, u_prime](double t) {
        return std::exp(-2.0 * u(t)) * (p.b_prime(t) - 2.0 * u_prime(t) * p.b(t));
    };
    out.a = [p, u, u_prime, n](double t) {
        return std::exp(-2.0 * u(t)) * ((n - 2) * u_prime(t) * p.b(t) + p.a(t));
    };
    out.label = p.label + "-conformal";
    return out;
}

/// Hessian of f in the conformally scaled metric e^{2 sigma} g, evaluated
/// through the transformed Levi-Civita connection:
///   H~(X,Y) = H(X,Y) - X(sigma) Y(f) - Y(sigma) X(f) + <X,Y> <grad sigma, grad f>.
/// Every ingredient is finite-difference; nothing is substituted from closed
/// forms.
inline double conformal_numeric_hessian(const ScalarField& f, const ScalarField& sigma,
                                        const Sp2Element& q, const Sp2Tangent& u,
                                        const Sp2Tangent& v, const MetricWeights& w = {},
                                        double h = 1e-5) {
    const double base = numeric_hessian(f, q, u, v, w, h);
    const detail::GradientProbes probes(w, h);
    const Sp2Tangent grad_f = detail::field_gradient(f, q, w, probes);
    const Sp2Tangent grad_s = detail::field_gradient(sigma, q, w, probes);
    const double uf = inner(grad_f.xi, u.xi, w);
    const double vf = inner(grad_f.xi, v.xi, w);
    const double us = inner(grad_s.xi, u.xi, w);
    const double vs = inner(grad_s.xi, v.xi, w);
    return base - us * vf - vs * uf + inner(u.xi, v.xi, w) * inner(grad_s.xi, grad_f.xi, w);
}

/// Residual between the deformed-metric numeric Hessian of F and the closed
/// transformation law H + u'(f) b(f) <X,Y> - 2 u'(f) X(f) Y(f) for the scale
/// factor e^{2u(F)} on Sp(2).
inline double hessian_deform_check(const Sp2Element& q, const Sp2Tangent& u, const Sp2Tangent& v,
                                   const std::function<double(double)>& u_func,
                                   const std::function<double(double)>& u_prime, double h = 1e-5) {
    const ScalarField f = F_scalar_field(false);
    const ScalarField sigma{[u_func](const Sp2Element& m) { return u_func(F_eval(m)); }, {}};
    const double lhs = conformal_numeric_hessian(f, sigma, q, u, v, {}, h);
    const double t = F_eval(q);
    const Sp2Tangent grad = grad_F_closed(q);
    const double uf = inner(grad.xi, u.xi);
    const double vf = inner(grad.xi, v.xi);
    const double rhs = hessian_F_closed(q, u, v) +
                       u_prime(t) * (1.0 - t * t) * inner(u.xi, v.xi) - 2.0 * u_prime(t) * uf * vf;
    return std::abs(lhs - rhs);
}

/// Per-point comparison of the deformed profile against all-numeric gradient
/// and Laplacian data in the scaled metric. The squared gradient norm is
/// assembled from finite-difference directional derivatives contracted with
/// the inverse scaled metric; the Laplacian is the scaled-metric trace of the
/// conformal numeric Hessian.
struct ConformalCheckResult {
    double gradient_residual = 0.0;
    double laplacian_residual = 0.0;
};

inline ConformalCheckResult conformal_field_check(const Sp2Element& q,
                                                  const std::function<double(double)>& u,
                                                  const std::function<double(double)>& u_prime,
                                                  int n, double h = 1e-5) {
    const LevelProfilePair deformed = conformal_deform(sp2_profile(), u, u_prime, n);
    const ScalarField f = F_scalar_field(false);
    const ScalarField sigma{[u](const Sp2Element& m) { return u(F_eval(m)); }, {}};
    const double t = F_eval(q);
    const double scale = std::exp(-2.0 * u(t));

    const std::array<Sp2Algebra, 10> basis = orthonormal_basis();
    double grad2 = 0.0;
    double trace = 0.0;
    for (const Sp2Algebra& e : basis) {
        const Sp2Tangent dir{q, e};
        const double df = directional_derivative(f, q, e, h);
        grad2 += df * df;
        trace += conformal_numeric_hessian(f, sigma, q, dir, dir, {}, h);
    }
    ConformalCheckResult out;
    out.gradient_residual = std::abs(scale * grad2 - deformed.b(t));
    out.laplacian_residual = std::abs(scale * trace - deformed.a(t));
    return out;
}

/// Residuals of the Riemannian-submersion lift identities on the exotic
/// quotient: |grad F|^2 = 1 - f^2 downstairs, and the Laplacian relation
/// "upstairs Laplacian = quotient Laplacian - fiber mean curvature term",
/// with the fiber term evaluated by covariant differentiation of the orbit
/// frame rather than by the Hessian shortcut used inside quotient_laplacian.
struct SubmersionLiftResult {
    double gradient_residual = 0.0;
    double laplacian_residual = 0.0;
};

inline SubmersionLiftResult submersion_lift_check(const Sp2Element& q, double h = 1e-5) {
    SubmersionLiftResult out;
    const double f = F_eval(q);
    out.gradient_residual = std::abs(grad_F_norm2_closed(q) - (1.0 - f * f));
    const double upstairs = hessian_F_trace(q);
    const double downstairs = quotient_laplacian(q) - phi_frame_derivative(q, h);
    out.laplacian_residual = std::abs(upstairs - downstairs);
    return out;
}

}  // namespace sp2iso
