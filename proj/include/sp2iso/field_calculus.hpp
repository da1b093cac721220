#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sp2iso/connection.hpp"
#include "sp2iso/sp2.hpp"

namespace sp2iso {

/// Scalar field on Sp(2). The gradient callback is optional; numeric paths
/// fall back to finite differences when it is absent.
struct ScalarField {
    std::function<double(const Sp2Element&)> value;
    std::function<Sp2Tangent(const Sp2Element&, const MetricWeights&)> gradient;
};

namespace detail {

/// Precomputed probe pairs exp(+h e_i), exp(-h e_i) for the orthonormal basis.
struct GradientProbes {
    MetricWeights w;
    double h;
    std::array<Sp2Algebra, 10> dirs;
    std::array<Mat2H, 10> fwd;
    std::array<Mat2H, 10> bwd;

    GradientProbes(const MetricWeights& weights, double step) : w(weights), h(step) {
        dirs = orthonormal_basis(weights);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            fwd[i] = expm(dirs[i].matrix() * h);
            bwd[i] = expm(dirs[i].matrix() * (-h));
        }
    }
};

inline Sp2Tangent gradient_with_probes(const ScalarField& f, const Sp2Element& q,
                                       const GradientProbes& p) {
    Sp2Algebra g{};
    for (std::size_t i = 0; i < p.dirs.size(); ++i) {
        const double fp = f.value(Sp2Element(mul(q.matrix(), p.fwd[i])));
        const double fm = f.value(Sp2Element(mul(q.matrix(), p.bwd[i])));
        g = g + p.dirs[i] * ((fp - fm) / (2.0 * p.h));
    }
    return {q, g};
}

}  // namespace detail

/// Metric gradient by central differences of f along the geodesic probe curves
/// q exp(s e_i) through the orthonormal basis directions.
inline Sp2Tangent numeric_gradient(const ScalarField& f, const Sp2Element& q,
                                   const MetricWeights& w = {}, double h = 1e-5) {
    return detail::gradient_with_probes(f, q, detail::GradientProbes(w, h));
}

/// Directional derivative of f at q along the (not necessarily unit) direction u.
inline double directional_derivative(const ScalarField& f, const Sp2Element& q,
                                     const Sp2Algebra& u, double h = 1e-5) {
    const double n = norm(u);
    if (n < 1e-300) return 0.0;
    const Sp2Algebra dir = u * (1.0 / n);
    const double fp = f.value(Sp2Element(mul(q.matrix(), expm(dir.matrix() * h))));
    const double fm = f.value(Sp2Element(mul(q.matrix(), expm(dir.matrix() * (-h)))));
    return n * (fp - fm) / (2.0 * h);
}

namespace detail {

inline Sp2Tangent field_gradient(const ScalarField& f, const Sp2Element& q, const MetricWeights& w,
                                 const GradientProbes& probes) {
    if (f.gradient) return f.gradient(q, w);
    return gradient_with_probes(f, q, probes);
}

}  // namespace detail

/// Hessian H_f(u, v) = <nabla_u grad f, v>, evaluated as a first difference of
/// the (closed-form or numeric) gradient along the probe curve of u plus the
/// left-invariant connection term. One difference order less than a second
/// difference of f, which keeps cancellation in check.
inline double numeric_hessian(const ScalarField& f, const Sp2Element& q, const Sp2Tangent& u,
                              const Sp2Tangent& v, const MetricWeights& w = {}, double h = 1e-5) {
    if (frobenius_dist(u.base, q) > 1e-8 || frobenius_dist(v.base, q) > 1e-8)
        throw std::domain_error("numeric_hessian: tangents not based at q");
    const detail::GradientProbes probes(w, h);
    // With a nested finite-difference gradient the outer step is widened to
    // balance truncation against the noise floor of the inner differences.
    const double hs = f.gradient ? h : 1e-3;
    const double un = norm(u.xi, w);
    if (un < 1e-300) return 0.0;
    const Sp2Algebra dir = u.xi * (1.0 / un);
    const Sp2Element qp = Sp2Element(mul(q.matrix(), expm(dir.matrix() * hs)));
    const Sp2Element qm = Sp2Element(mul(q.matrix(), expm(dir.matrix() * (-hs))));
    const Sp2Algebra gp = detail::field_gradient(f, qp, w, probes).xi;
    const Sp2Algebra gm = detail::field_gradient(f, qm, w, probes).xi;
    const Sp2Algebra g0 = detail::field_gradient(f, q, w, probes).xi;
    const Sp2Algebra d_g = (gp - gm) * (un / (2.0 * hs));
    const Sp2Algebra cov = d_g + levi_civita_left_invariant(u.xi, g0, w);
    return inner(cov, v.xi, w);
}

namespace detail {

/// Probe matrices for the Hessian trace: inner-gradient probes at step h plus
/// outer-difference probes at step hs along the same basis directions.
struct LaplacianWorkspace {
    GradientProbes probes;
    std::array<Mat2H, 10> fwd;
    std::array<Mat2H, 10> bwd;
    double hs;

    LaplacianWorkspace(const MetricWeights& w, double h, bool nested)
        : probes(w, h), hs(nested ? 1e-3 : h) {
        for (std::size_t i = 0; i < probes.dirs.size(); ++i) {
            fwd[i] = expm(probes.dirs[i].matrix() * hs);
            bwd[i] = expm(probes.dirs[i].matrix() * (-hs));
        }
    }
};

inline double laplacian_with_workspace(const ScalarField& f, const Sp2Element& q,
                                       const MetricWeights& w, const LaplacianWorkspace& ws) {
    const Sp2Algebra g0 = field_gradient(f, q, w, ws.probes).xi;
    double trace = 0.0;
    for (std::size_t i = 0; i < ws.probes.dirs.size(); ++i) {
        const Sp2Element qp = Sp2Element(mul(q.matrix(), ws.fwd[i]));
        const Sp2Element qm = Sp2Element(mul(q.matrix(), ws.bwd[i]));
        const Sp2Algebra gp = field_gradient(f, qp, w, ws.probes).xi;
        const Sp2Algebra gm = field_gradient(f, qm, w, ws.probes).xi;
        const Sp2Algebra d_g = (gp - gm) * (1.0 / (2.0 * ws.hs));
        const Sp2Algebra cov = d_g + levi_civita_left_invariant(ws.probes.dirs[i], g0, w);
        trace += inner(cov, ws.probes.dirs[i], w);
    }
    return trace;
}

}  // namespace detail

/// Laplace-Beltrami value as the metric trace of the numeric Hessian.
inline double numeric_laplacian(const ScalarField& f, const Sp2Element& q,
                                const MetricWeights& w = {}, double h = 1e-5) {
    const detail::LaplacianWorkspace ws(w, h, !f.gradient);
    return detail::laplacian_with_workspace(f, q, w, ws);
}

/// Result of a binned functional-dependence test on pairs (s, v).
struct DependenceReport {
    std::vector<double> bin_edges;    ///< quantile edges, size bins+1
    std::vector<int> bin_count;
    std::vector<double> bin_center;   ///< mean of s per bin
    std::vector<double> bin_mean;     ///< mean of v per bin
    std::vector<double> bin_spread;   ///< max |v residual| per bin (see below)
    double max_spread = 0.0;
    double tolerance = 0.0;
    bool against_reference = false;
    bool pass = false;
};

/// Tests whether v is (numerically) a function of s. The sample is split into
/// quantile bins in s. Within each bin the spread is the maximum absolute
/// residual of v, either against the supplied reference profile or, without
/// one, against a per-bin least-squares quadratic in s (which absorbs the
/// variation of any smooth profile across the bin). Verdict: max spread <= tol.
/// Throws std::domain_error when any bin would hold fewer than 10 pairs.
inline DependenceReport dependence_test(
    const std::vector<std::pair<double, double>>& pairs, int bins, double tol,
    const std::function<double(double)>& reference = nullptr) {
    if (bins < 1) throw std::domain_error("dependence_test: bins must be positive");
    if (pairs.size() < static_cast<std::size_t>(10 * bins))
        throw std::domain_error("dependence_test: insufficient samples per bin");
    std::vector<std::pair<double, double>> sorted = pairs;
    std::sort(sorted.begin(), sorted.end());

    DependenceReport rep;
    rep.tolerance = tol;
    rep.against_reference = static_cast<bool>(reference);
    const std::size_t n = sorted.size();
    rep.bin_edges.push_back(sorted.front().first);
    for (int b = 0; b < bins; ++b) {
        const std::size_t lo = (n * static_cast<std::size_t>(b)) / static_cast<std::size_t>(bins);
        const std::size_t hi =
            (n * static_cast<std::size_t>(b + 1)) / static_cast<std::size_t>(bins);
        const std::size_t count = hi - lo;
        if (count < 10) throw std::domain_error("dependence_test: insufficient samples per bin");
        double s_mean = 0.0, v_mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s_mean += sorted[i].first;
            v_mean += sorted[i].second;
        }
        s_mean /= static_cast<double>(count);
        v_mean /= static_cast<double>(count);

        double spread = 0.0;
        if (reference) {
            for (std::size_t i = lo; i < hi; ++i)
                spread = std::max(spread, std::abs(sorted[i].second - reference(sorted[i].first)));
        } else {
            // Least-squares quadratic v ~ c0 + c1 (s - s_mean) + c2 (s - s_mean)^2
            // via the 3x3 normal equations.
            double m[3][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
            for (std::size_t i = lo; i < hi; ++i) {
                const double t = sorted[i].first - s_mean;
                const double p[3] = {1.0, t, t * t};
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) m[r][c] += p[r] * p[c];
                    m[r][3] += p[r] * sorted[i].second;
                }
            }
            // Gaussian elimination with partial pivoting; a singular system
            // (all s equal in the bin) degrades to the constant fit.
            double coef[3] = {v_mean, 0.0, 0.0};
            bool solved = true;
            for (int col = 0; col < 3 && solved; ++col) {
                int piv = col;
                for (int r = col + 1; r < 3; ++r)
                    if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
                if (std::abs(m[piv][col]) < 1e-13) {
                    solved = false;
                    break;
                }
                std::swap(m[piv], m[col]);
                for (int r = 0; r < 3; ++r) {
                    if (r == col) continue;
                    const double fac = m[r][col] / m[col][col];
                    for (int c = col; c < 4; ++c) m[r][c] -= fac * m[col][c];
                }
            }
            if (solved)
                for (int r = 0; r < 3; ++r) coef[r] = m[r][3] / m[r][r];
            for (std::size_t i = lo; i < hi; ++i) {
                const double t = sorted[i].first - s_mean;
                const double fit = coef[0] + coef[1] * t + coef[2] * t * t;
                spread = std::max(spread, std::abs(sorted[i].second - fit));
            }
        }
        rep.bin_edges.push_back(sorted[hi - 1].first);
        rep.bin_count.push_back(static_cast<int>(count));
        rep.bin_center.push_back(s_mean);
        rep.bin_mean.push_back(v_mean);
        rep.bin_spread.push_back(spread);
        rep.max_spread = std::max(rep.max_spread, spread);
    }
    rep.pass = rep.max_spread <= tol;
    return rep;
}

/// Options for transnormal_report.
struct TransnormalOptions {
    int bins = 32;
    double trim = 0.95;           ///< samples with |f| above this are excluded
    double gradient_tol = 1e-6;   ///< verdict tolerance for the (f, |grad f|^2) test
    double laplacian_tol = 1e-3;  ///< verdict tolerance for the (f, lap f) test
    double h = 1e-5;
};

/// Outcome of the sampled transnormality / isoparametry verification.
struct TransnormalReport {
    DependenceReport gradient_dependence;
    DependenceReport laplacian_dependence;
    bool transnormal = false;
    bool isoparametric = false;
    long trimmed = 0;
    long excluded = 0;
    std::string note;
};

/// Samples the field at Haar points, trims near-extreme levels, and runs the
/// dependence tests for |grad f|^2 and for the Laplacian against the level.
/// When the field carries a closed-form gradient it is used for both
/// quantities; otherwise everything is finite differences. The verdict
/// certifies C^0 closeness of the profiles on the sampled range only.
inline TransnormalReport transnormal_report(const ScalarField& f, long samples,
                                            std::uint64_t seed, const MetricWeights& w = {},
                                            const TransnormalOptions& opt = {}) {
    HaarSampler sampler(seed);
    const detail::LaplacianWorkspace ws(w, opt.h, !f.gradient);
    const detail::GradientProbes& probes = ws.probes;
    std::vector<std::pair<double, double>> grad_pairs;
    std::vector<std::pair<double, double>> lap_pairs;
    TransnormalReport rep;
    for (long k = 0; k < samples; ++k) {
        const Sp2Element q = sampler.next();
        const double t = f.value(q);
        if (std::abs(t) > opt.trim) {
            ++rep.trimmed;
            continue;
        }
        const Sp2Tangent g = detail::field_gradient(f, q, w, probes);
        grad_pairs.emplace_back(t, inner(g.xi, g.xi, w));
        lap_pairs.emplace_back(t, detail::laplacian_with_workspace(f, q, w, ws));
    }
    rep.gradient_dependence = dependence_test(grad_pairs, opt.bins, opt.gradient_tol);
    rep.laplacian_dependence = dependence_test(lap_pairs, opt.bins, opt.laplacian_tol);
    rep.transnormal = rep.gradient_dependence.pass;
    rep.isoparametric = rep.transnormal && rep.laplacian_dependence.pass;
    rep.note = "binned C^0 certification on |f| <= " + std::to_string(opt.trim) +
               "; no derivative bounds implied";
    return rep;
}

}  // namespace sp2iso
