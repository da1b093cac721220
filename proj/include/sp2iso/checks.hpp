#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sp2iso/connection.hpp"
#include "sp2iso/field_calculus.hpp"
#include "sp2iso/gromoll_meyer.hpp"
#include "sp2iso/level_geometry.hpp"
#include "sp2iso/munzner.hpp"
#include "sp2iso/report.hpp"
#include "sp2iso/transnormal.hpp"

namespace sp2iso {

/// Shared knobs of the verification batteries. When tol is set it overrides
/// the default tolerance of every residual check (structural zero-tolerance
/// verdicts keep their semantics).
struct CheckOptions {
    long long samples = 10000;
    unsigned long long seed = 42;
    std::optional<double> tol;
};

namespace detail {

inline double tol_or(const CheckOptions& opt, double fallback) {
    return opt.tol.value_or(fallback);
}

inline Sp2Algebra random_algebra(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return Sp2Algebra{Quaternion{0.0, g(rng), g(rng), g(rng)},
                      Quaternion{g(rng), g(rng), g(rng), g(rng)},
                      Quaternion{0.0, g(rng), g(rng), g(rng)}};
}

inline Quaternion random_unit_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q{g(rng), g(rng), g(rng), g(rng)};
    while (norm(q) < 1e-6) q = Quaternion{g(rng), g(rng), g(rng), g(rng)};
    return normalized(q);
}

inline std::string dependence_note(const std::string& name, const DependenceReport& rep) {
    return name + ": max bin spread " + fmt(rep.max_spread) + " over " +
           std::to_string(rep.bin_count.size()) + " bins -> " +
           (rep.pass ? "functional" : "not functional");
}

/// Max covariant derivative of the velocity along a stored geodesic path,
/// with the s-derivative taken by a fourth-order central difference so the
/// finite-difference truncation stays far below the 1e-6 target.
inline double geodesic_parallel_residual(const GeodesicPath& path, const MetricWeights& w = {}) {
    double worst = 0.0;
    const std::size_t n = path.s.size();
    for (std::size_t k = 2; k + 2 < n; ++k) {
        const double h = path.s[k + 1] - path.s[k];
        if (h <= 0.0) continue;
        const Sp2Algebra d = (path.velocity[k - 2] - path.velocity[k + 2] +
                              (path.velocity[k + 1] - path.velocity[k - 1]) * 8.0) *
                             (1.0 / (12.0 * h));
        const Sp2Algebra cov =
            d + levi_civita_left_invariant(path.velocity[k], path.velocity[k], w);
        worst = std::max(worst, norm(cov, w));
    }
    return worst;
}

/// Structural distance of a group element from the focal form diag(+-1, d).
inline double focal_structure_residual(const Sp2Element& m) {
    const double sgn = re(m.a()) >= 0.0 ? 1.0 : -1.0;
    return std::max({norm(m.a() - Quaternion::one() * sgn), norm(m.b()), norm(m.c()),
                     std::abs(norm(m.d()) - 1.0)});
}

struct NormalFormSample {
    double a1 = 0.0, a2 = 0.0, b0 = 0.0, b1 = 0.0;
    Sp2Element q;
};

/// Zero-level point in normal-form coordinates, obtained by flowing a Haar
/// sample along the normalized gradient and conjugating into normal form.
inline NormalFormSample flow_normal_form_sample(HaarSampler& sampler) {
    const Sp2Element raw = flow_to_level(sampler.next(), 0.0);
    const NormalForm nf = normal_form(raw.a(), raw.b());
    return {nf.a.x, nf.a.y, nf.b.w, nf.b.x, s3_act(nf.q, raw)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// verify sp2
// ---------------------------------------------------------------------------

inline std::vector<VerificationReport> run_sp2_checks(const CheckOptions& opt) {
    std::vector<VerificationReport> out;
    const MetricWeights w{};

    {
        // Closed-form transnormality: |grad F|^2 = 1 - F^2 pointwise.
        Stopwatch sw;
        const unsigned long long seed = opt.seed;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (long long k = 0; k < opt.samples; ++k) {
            const Sp2Element q = sampler.next();
            const double f = F_eval(q);
            worst = std::max(worst, std::abs(grad_F_norm2_closed(q) - (1.0 - f * f)));
        }
        out.push_back(make_report("sp2.transnormal.closed", opt.samples, seed,
                                  detail::tol_or(opt, 1e-12), worst, sw.seconds(), w));
    }

    {
        // One finite-difference sweep shared by the gradient oracle, the
        // Laplacian reference fit, and the binned isoparametric verdict.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 1;
        HaarSampler sampler(seed);
        const ScalarField f = F_scalar_field(false);
        const detail::LaplacianWorkspace ws(w, 1e-5, true);
        double grad_worst = 0.0;
        std::vector<std::pair<double, double>> grad_pairs;
        std::vector<std::pair<double, double>> lap_pairs;
        long long trimmed = 0;
        for (long long k = 0; k < opt.samples; ++k) {
            const Sp2Element q = sampler.next();
            const double t = F_eval(q);
            const Sp2Algebra g = detail::gradient_with_probes(f, q, ws.probes).xi;
            const double g2 = inner(g, g);
            grad_worst = std::max(grad_worst, std::abs(g2 - (1.0 - t * t)));
            const double lap = detail::laplacian_with_workspace(f, q, w, ws);
            lap_pairs.emplace_back(t, lap);
            if (std::abs(t) <= 0.95) {
                grad_pairs.emplace_back(t, g2);
                ++trimmed;
            }
        }
        const double fd_time = sw.seconds();
        out.push_back(make_report("sp2.transnormal.fd", opt.samples, seed,
                                  detail::tol_or(opt, 1e-6), grad_worst, fd_time, w,
                                  {"finite-difference gradient vs 1 - F^2"}));

        Stopwatch sw2;
        const DependenceReport lap_ref =
            dependence_test(lap_pairs, 32, detail::tol_or(opt, 1e-3),
                            [](double t) { return -7.0 * t; });
        out.push_back(make_report("sp2.laplacian.dependence", opt.samples, seed,
                                  lap_ref.tolerance, lap_ref.max_spread, fd_time + sw2.seconds(),
                                  w,
                                  {"reference profile a(t) = -7 t",
                                   detail::dependence_note("laplacian vs reference", lap_ref)}));

        Stopwatch sw3;
        const DependenceReport grad_dep = dependence_test(grad_pairs, 32, 1e-6);
        std::vector<std::pair<double, double>> lap_trim;
        for (const auto& p : lap_pairs)
            if (std::abs(p.first) <= 0.95) lap_trim.push_back(p);
        const DependenceReport lap_dep = dependence_test(lap_trim, 32, 1e-3);
        const bool verdict = grad_dep.pass && lap_dep.pass;
        out.push_back(make_report(
            "sp2.isoparametric.verdict", trimmed, seed, 0.0, verdict ? 0.0 : 1.0,
            fd_time + sw3.seconds(), w,
            {std::string("transnormal: ") + (grad_dep.pass ? "yes" : "no"),
             std::string("isoparametric: ") + (verdict ? "yes" : "no"),
             detail::dependence_note("gradient", grad_dep),
             detail::dependence_note("laplacian", lap_dep)}));
    }

    {
        // Closed Hessian trace against -7 F.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 2;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (long long k = 0; k < opt.samples; ++k) {
            const Sp2Element q = sampler.next();
            worst = std::max(worst, std::abs(hessian_F_trace(q) + 7.0 * F_eval(q)));
        }
        out.push_back(make_report("sp2.laplacian.closed_trace", opt.samples, seed,
                                  detail::tol_or(opt, 1e-10), worst, sw.seconds(), w));
    }

    {
        // Shape-operator spectrum: closed branches vs the dense eigensolve.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 3;
        HaarSampler sampler(seed);
        double worst = 0.0;
        int taken = 0;
        while (taken < 200) {
            const Sp2Element q = sampler.next();
            if (norm(q.b()) <= 0.1 || std::abs(F_eval(q)) >= 1.0 - 1e-3) continue;
            worst = std::max(worst, shape_spectrum(q).crosscheck_residual);
            ++taken;
        }
        out.push_back(make_report("sp2.spectrum.regular", taken, seed,
                                  detail::tol_or(opt, 1e-8), worst, sw.seconds(), w,
                                  {"points restricted to |b| > 0.1 away from focal levels"}));
    }

    {
        // Minimal level t = 0: spectrum must be {0, |b|, -|b|}, multiplicity 3.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 4;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            Sp2Element q = flow_to_level(sampler.next(), 0.0);
            while (norm(q.b()) <= 1e-6) q = flow_to_level(sampler.next(), 0.0);
            const SpectrumResult sp = shape_spectrum(q);
            std::vector<std::pair<double, int>> got = sp.eigenvalues;
            std::sort(got.begin(), got.end());
            const double b = sp.b_norm;
            const std::array<std::pair<double, int>, 3> expect = {
                std::pair<double, int>{-b, 3}, {0.0, 3}, {b, 3}};
            if (got.size() != expect.size()) {
                worst = std::max(worst, 1.0);
                continue;
            }
            for (std::size_t i = 0; i < got.size(); ++i) {
                worst = std::max(worst, std::abs(got[i].first - expect[i].first));
                if (got[i].second != expect[i].second) worst = std::max(worst, 1.0);
            }
        }
        out.push_back(make_report("sp2.spectrum.midlevel", 50, seed, detail::tol_or(opt, 1e-8),
                                  worst, sw.seconds(), w,
                                  {"austere check: eigenvalues {0, |b|, -|b|} at t = 0"}));
    }

    {
        // Koszul evaluation vs the closed uniform-metric connection.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 5;
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const Sp2Algebra u = detail::random_algebra(rng);
            const Sp2Algebra v = detail::random_algebra(rng);
            worst = std::max(worst, norm(levi_civita_left_invariant(u, v, w) -
                                         levi_civita_uniform_closed(u, v)));
        }
        out.push_back(make_report("sp2.connection.koszul_closed", 200, seed,
                                  detail::tol_or(opt, 1e-12), worst, sw.seconds(), w));
    }

    {
        // Torsion-freeness at the uniform metric and at a non-uniform one.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 6;
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (const MetricWeights& wm : {MetricWeights{}, MetricWeights{1.0, 2.0, 1.0}}) {
            for (int k = 0; k < 200; ++k) {
                const Sp2Algebra u = detail::random_algebra(rng);
                const Sp2Algebra v = detail::random_algebra(rng);
                const Sp2Algebra torsion = levi_civita_left_invariant(u, v, wm) -
                                           levi_civita_left_invariant(v, u, wm) - bracket(u, v);
                worst = std::max(worst, norm(torsion, wm));
            }
        }
        out.push_back(make_report("sp2.connection.torsion", 400, seed,
                                  detail::tol_or(opt, 1e-12), worst, sw.seconds(), w,
                                  {"weights (1,1,1) and (1,2,1)"}));
    }

    {
        // Metric compatibility along curves, via finite differences of the
        // inner product of two varying left-trivialized fields.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 7;
        std::mt19937_64 rng(seed);
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (const MetricWeights& wm : {MetricWeights{}, MetricWeights{1.0, 2.0, 1.0}}) {
            for (int k = 0; k < 20; ++k) {
                const Sp2Element q0 = sampler.next();
                const Sp2Algebra dir = detail::random_algebra(rng);
                const Sp2Algebra v0 = detail::random_algebra(rng);
                const Sp2Algebra v1 = detail::random_algebra(rng);
                const Sp2Algebra w0 = detail::random_algebra(rng);
                const Sp2Algebra w1 = detail::random_algebra(rng);
                const auto curve = [&](double s) {
                    return Sp2Element(mul(q0.matrix(), expm(dir.matrix() * s)));
                };
                const auto vf = [&](double s) {
                    return Sp2Tangent{curve(s), v0 + v1 * std::sin(s)};
                };
                const auto wf = [&](double s) {
                    return Sp2Tangent{curve(s), w0 + w1 * std::cos(s)};
                };
                const double h = 1e-5;
                const double lhs = (inner(vf(h).xi, wf(h).xi, wm) -
                                    inner(vf(-h).xi, wf(-h).xi, wm)) /
                                   (2.0 * h);
                const Sp2Tangent dv = covariant_derivative_along(vf, curve, 0.0, dir, wm, h);
                const Sp2Tangent dw = covariant_derivative_along(wf, curve, 0.0, dir, wm, h);
                const double rhs = inner(dv.xi, wf(0.0).xi, wm) + inner(vf(0.0).xi, dw.xi, wm);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        out.push_back(make_report("sp2.connection.metric_compat", 40, seed,
                                  detail::tol_or(opt, 1e-6), worst, sw.seconds(), w,
                                  {"weights (1,1,1) and (1,2,1)"}));
    }

    {
        // Normal geodesics from the minimal level: arc length, focal arrival,
        // sine law, and parallelism of the velocity.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 8;
        HaarSampler sampler(seed);
        double arc_worst = 0.0, focal_worst = 0.0, sine_worst = 0.0, par_worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const Sp2Element q0 = flow_to_level(sampler.next(), 0.0);
            for (const int sign : {+1, -1}) {
                const NormalGeodesicTrace tr = normal_geodesic_trace(q0, sign);
                arc_worst = std::max(arc_worst, std::abs(tr.arc_length - std::numbers::pi / 2.0));
                focal_worst =
                    std::max(focal_worst, detail::focal_structure_residual(tr.endpoint));
                sine_worst = std::max(sine_worst, tr.sine_law_residual);
                par_worst = std::max(par_worst, detail::geodesic_parallel_residual(tr.path));
            }
        }
        const double elapsed = sw.seconds();
        out.push_back(make_report("sp2.geodesic.arc_length", 20, seed, detail::tol_or(opt, 1e-4),
                                  arc_worst, elapsed, w,
                                  {"normal geodesics from t = 0, both directions"}));
        out.push_back(make_report("sp2.geodesic.endpoint", 20, seed, detail::tol_or(opt, 1e-6),
                                  focal_worst, elapsed, w,
                                  {"arrival of the form diag(+-1, d)"}));
        out.push_back(make_report("sp2.geodesic.sine_law", 20, seed, detail::tol_or(opt, 1e-4),
                                  sine_worst, elapsed, w,
                                  {"F(s) = sin(asin t0 + sign * s) along traces"}));
        out.push_back(make_report("sp2.geodesic.parallel", 20, seed, detail::tol_or(opt, 1e-6),
                                  par_worst, elapsed, w,
                                  {"covariant derivative of the velocity along traces"}));
    }

    return out;
}

// ---------------------------------------------------------------------------
// verify gm
// ---------------------------------------------------------------------------

inline std::vector<VerificationReport> run_gm_checks(const CheckOptions& opt) {
    std::vector<VerificationReport> out;
    const MetricWeights w{};
    const double r2 = 1.0 / std::sqrt(2.0);
    const Sp2Element witness_phi =
        complete_row(Quaternion{0.0, r2, 0.0, 0.0}, Quaternion{0.5, 0.5, 0.0, 0.0});
    const Sp2Element witness_zero =
        complete_row(Quaternion{0.0, 1.0, 0.0, 0.0}, Quaternion::zero());
    const double phi_target = 4.0 * std::sqrt(2.0) / 15.0;

    std::vector<std::pair<double, double>> grad_pairs;
    std::vector<std::pair<double, double>> lap_pairs;
    {
        // Quotient sampling: Haar points upstairs represent their orbits.
        Stopwatch sw;
        const unsigned long long seed = opt.seed;
        HaarSampler sampler(seed);
        double grad_worst = 0.0;
        for (long long k = 0; k < opt.samples; ++k) {
            const Sp2Element q = sampler.next();
            const double f = F_eval(q);
            const double g2 = grad_F_norm2_closed(q);
            grad_worst = std::max(grad_worst, std::abs(g2 - (1.0 - f * f)));
            grad_pairs.emplace_back(f, g2);
            if (std::abs(f) <= 0.95) lap_pairs.emplace_back(f, quotient_laplacian(q));
        }
        const DependenceReport grad_dep =
            dependence_test(grad_pairs, 32, detail::tol_or(opt, 1e-8),
                            [](double t) { return 1.0 - t * t; });
        out.push_back(make_report("gm.dependence.gradient", opt.samples, seed,
                                  grad_dep.tolerance, grad_dep.max_spread, sw.seconds(), w,
                                  {"reference profile b(t) = 1 - t^2",
                                   detail::dependence_note("gradient", grad_dep)}));
    }

    {
        // Negative check: the quotient Laplacian must NOT be a function of f.
        // Required: verdict "not functional" and bin spread >= 0.1 near f = 0.
        Stopwatch sw;
        const unsigned long long seed = opt.seed;
        const DependenceReport lap_dep = dependence_test(lap_pairs, 32, 1e-3);
        double near_zero_spread = 0.0;
        for (std::size_t i = 0; i < lap_dep.bin_center.size(); ++i)
            if (std::abs(lap_dep.bin_center[i]) < 0.2)
                near_zero_spread = std::max(near_zero_spread, lap_dep.bin_spread[i]);
        const double shortfall = std::max(0.0, 0.1 - near_zero_spread);
        const double residual = std::max(shortfall, lap_dep.pass ? 1.0 : 0.0);
        out.push_back(make_report(
            "gm.dependence.laplacian_not_functional", static_cast<long long>(lap_pairs.size()),
            seed, 0.0, residual, sw.seconds(), w,
            {detail::dependence_note("laplacian", lap_dep),
             "bin spread near f = 0: " + fmt(near_zero_spread) + " (required >= 0.1)"}));
    }

    {
        // Verdict: transnormal but not isoparametric.
        const DependenceReport grad_dep =
            dependence_test(grad_pairs, 32, 1e-8, [](double t) { return 1.0 - t * t; });
        const DependenceReport lap_dep = dependence_test(lap_pairs, 32, 1e-3);
        const bool verdict = grad_dep.pass && !lap_dep.pass;
        out.push_back(make_report("gm.verdict.transnormal_not_isoparametric",
                                  static_cast<long long>(grad_pairs.size()), opt.seed, 0.0,
                                  verdict ? 0.0 : 1.0, 0.0, w,
                                  {std::string("transnormal: ") + (grad_dep.pass ? "yes" : "no"),
                                   std::string("isoparametric: ") + (lap_dep.pass ? "yes" : "no"),
                                   "the induced metric is transnormal but not isoparametric"}));
    }

    {
        // The two phi witnesses.
        Stopwatch sw;
        const double at_zero = std::abs(phi_numeric(witness_zero));
        const double at_max = std::abs(phi_numeric(witness_phi) - phi_target);
        const double worst = std::max(at_zero, at_max);
        out.push_back(make_report(
            "gm.phi.witnesses", 2, opt.seed, detail::tol_or(opt, 1e-9), worst, sw.seconds(), w,
            {"phi(a=i, b=0) = " + fmt(phi_numeric(witness_zero)),
             "phi(a=i/sqrt2, b=(1+i)/2) = " + fmt(phi_numeric(witness_phi)) +
                 " (target 4 sqrt2 / 15 = " + fmt(phi_target) + ")"}));
    }

    double gram_worst = 0.0;
    {
        // Closed vs numeric phi at zero-level normal-form points, plus the
        // closed Gram data against direct frame inner products.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 1;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const detail::NormalFormSample s = detail::flow_normal_form_sample(sampler);
            worst = std::max(worst, std::abs(phi_closed(s.a1, s.a2, s.b0, s.b1) -
                                             phi_numeric(s.q)));
            const GramData num = gram_matrix(s.q);
            const GramData closed = gram_closed(s.a1, s.a2, s.b0, s.b1);
            gram_worst = std::max(gram_worst, (num.g - closed.g).cwiseAbs().maxCoeff());
        }
        out.push_back(make_report("gm.phi.closed_vs_numeric", 200, seed,
                                  detail::tol_or(opt, 1e-10), worst, sw.seconds(), w,
                                  {"zero-level normal-form points reached by gradient flow"}));
    }

    {
        // Gram witnesses: exact values at the two reference points, and the
        // flow-sampled closed-vs-numeric agreement from above.
        Stopwatch sw;
        const GramData g1 = gram_closed(r2, 0.0, 0.5, 0.5);
        const GramData g2 = gram_closed(1.0, 0.0, 0.0, 0.0);
        double worst = gram_worst;
        worst = std::max(worst, std::abs(g1.g(0, 0) - 0.75));
        worst = std::max(worst, std::abs(g1.g(1, 1) - 3.75));
        worst = std::max(worst, std::abs(g1.g(2, 2) - 3.75));
        worst = std::max(worst, std::abs(g1.g(0, 1)));
        worst = std::max(worst, std::abs(g1.e - 45.0 / 16.0));
        worst = std::max(worst, std::abs(g2.g(0, 0) - 1.0));
        worst = std::max(worst, std::abs(g2.g(1, 1) - 5.0));
        worst = std::max(worst, std::abs(g2.g(2, 2) - 5.0));
        out.push_back(make_report("gm.gram.witnesses", 202, opt.seed + 1,
                                  detail::tol_or(opt, 1e-12), worst, sw.seconds(), w,
                                  {"closed Gram data vs exact values and frame inner products"}));
    }

    {
        // Independent phi oracle: covariant derivatives of the orbit frame.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 2;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Sp2Element q = sampler.next();
            worst = std::max(worst, std::abs(phi_frame_derivative(q) - phi_numeric(q)));
        }
        out.push_back(make_report("gm.phi.frame_oracle", 50, seed, detail::tol_or(opt, 1e-6),
                                  worst, sw.seconds(), w,
                                  {"frame-derivative trace vs Hessian form of phi"}));
    }

    {
        // Invariance of F, |grad F|^2, and phi along orbits.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 3;
        HaarSampler sampler(seed);
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Sp2Element q = sampler.next();
            const double f0 = F_eval(q);
            const double g0 = grad_F_norm2_closed(q);
            const double p0 = phi_numeric(q);
            for (int j = 0; j < 20; ++j) {
                const Sp2Element moved = s3_act(detail::random_unit_quaternion(rng), q);
                worst = std::max(worst, std::abs(F_eval(moved) - f0));
                worst = std::max(worst, std::abs(grad_F_norm2_closed(moved) - g0));
                worst = std::max(worst, std::abs(phi_numeric(moved) - p0));
            }
        }
        out.push_back(make_report("gm.invariance", 1000, seed, detail::tol_or(opt, 1e-10), worst,
                                  sw.seconds(), w,
                                  {"F, |grad F|^2, phi along 20 translates of 50 points"}));
    }

    {
        // Normal-form structure: b in span{1,i}, a in span{1,i,j}, canonical
        // signs, unit conjugator, and row norm preservation.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 4;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const Sp2Element q = sampler.next();
            const NormalForm nf = normal_form(q.a(), q.b());
            worst = std::max({worst, std::abs(nf.b.y), std::abs(nf.b.z), std::abs(nf.a.z)});
            worst = std::max(worst, std::max(0.0, -nf.b.x));
            if (std::abs(nf.b.x) + std::abs(nf.b.y) + std::abs(nf.b.z) > 1e-12)
                worst = std::max(worst, std::max(0.0, -nf.a.y));
            worst = std::max(worst, std::abs(norm(nf.q) - 1.0));
            worst = std::max(worst, std::abs((norm2(nf.a) + norm2(nf.b)) -
                                             (norm2(q.a()) + norm2(q.b()))));
        }
        out.push_back(make_report("gm.normal_form.structure", 500, seed,
                                  detail::tol_or(opt, 1e-12), worst, sw.seconds(), w));
    }

    {
        // Horizontality: the orbit frame is orthogonal to grad F.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 5;
        HaarSampler sampler(seed);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Sp2Element q = sampler.next();
            const OrbitFrame fr = orbit_frame(q);
            const Sp2Tangent grad = grad_F_closed(q);
            for (const Sp2Tangent& nu : fr.nu)
                worst = std::max(worst, std::abs(inner(nu.xi, grad.xi)));
        }
        out.push_back(make_report("gm.orbit.horizontal", 1000, seed, detail::tol_or(opt, 1e-12),
                                  worst, sw.seconds(), w));
    }

    {
        // Mean curvature on the zero level: equals -phi there, and is not
        // constant (range across the level at least 0.3).
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 6;
        HaarSampler sampler(seed);
        double identity_worst = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 200; ++k) {
            const Sp2Element q = flow_to_level(sampler.next(), 0.0);
            const double mc = mean_curvature_gm(q);
            identity_worst = std::max(identity_worst, std::abs(mc + phi_numeric(q)));
            lo = std::min(lo, mc);
            hi = std::max(hi, mc);
        }
        const double elapsed = sw.seconds();
        out.push_back(make_report("gm.mean_curvature.level_zero", 200, seed,
                                  detail::tol_or(opt, 1e-10), identity_worst, elapsed, w,
                                  {"identity H = -phi on the zero level"}));
        out.push_back(make_report("gm.mean_curvature.nonconstant", 200, seed, 0.0,
                                  std::max(0.0, 0.3 - (hi - lo)), elapsed, w,
                                  {"observed range " + fmt(hi - lo) + " (required >= 0.3)",
                                   "no regular level of constant mean curvature"}));
    }

    {
        // Focal limit: phi vanishes at focal arrivals, so the quotient
        // Laplacian approaches -7 f there.
        Stopwatch sw;
        double worst = 0.0;
        for (const int sign : {+1, -1}) {
            const NormalGeodesicTrace tr = normal_geodesic_trace(witness_phi, sign);
            worst = std::max(worst, std::abs(quotient_laplacian(tr.endpoint) +
                                             7.0 * F_eval(tr.endpoint)));
        }
        out.push_back(make_report("gm.laplacian.focal_limit", 2, opt.seed,
                                  detail::tol_or(opt, 1e-8), worst, sw.seconds(), w,
                                  {"quotient Laplacian tends to -7 f at focal points"}));
    }

    {
        // Full finite-difference cross-check of the quotient Laplacian via
        // the submersion relation: upstairs FD Laplacian + frame-derivative
        // phi must reproduce -7 f + phi.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 7;
        HaarSampler sampler(seed);
        const ScalarField f = F_scalar_field(false);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Sp2Element q = sampler.next();
            const double lhs = numeric_laplacian(f, q) + phi_frame_derivative(q);
            worst = std::max(worst, std::abs(lhs - quotient_laplacian(q)));
        }
        out.push_back(make_report("gm.quotient.laplacian_fd", 20, seed,
                                  detail::tol_or(opt, 1e-3), worst, sw.seconds(), w,
                                  {"nested finite differences upstairs + frame phi"}));
    }

    {
        // Submersion lift identities.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 8;
        HaarSampler sampler(seed);
        double grad_worst = 0.0, lap_worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const SubmersionLiftResult r = submersion_lift_check(sampler.next());
            grad_worst = std::max(grad_worst, r.gradient_residual);
            lap_worst = std::max(lap_worst, r.laplacian_residual);
        }
        const double elapsed = sw.seconds();
        out.push_back(make_report("gm.submersion.gradient", 50, seed,
                                  detail::tol_or(opt, 1e-12), grad_worst, elapsed, w));
        out.push_back(make_report("gm.submersion.laplacian", 50, seed,
                                  detail::tol_or(opt, 1e-6), lap_worst, elapsed, w,
                                  {"upstairs trace vs quotient Laplacian minus fiber term"}));
    }

    {
        // Orbit-point equality: translates identify, independent points do not.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 9;
        HaarSampler sampler(seed);
        std::mt19937_64 rng(seed);
        double mismatches = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Sp2Element q = sampler.next();
            const OrbitPoint base(q);
            const OrbitPoint moved(s3_act(detail::random_unit_quaternion(rng), q));
            if (!orbit_equal(base, moved)) mismatches += 1.0;
        }
        for (int k = 0; k < 10; ++k) {
            const OrbitPoint p(sampler.next());
            const OrbitPoint r(sampler.next());
            if (orbit_equal(p, r)) mismatches += 1.0;
        }
        out.push_back(make_report("gm.orbit.equality", 30, seed, 0.0, mismatches, sw.seconds(),
                                  w, {"20 same-orbit pairs, 10 independent pairs"}));
    }

    return out;
}

// ---------------------------------------------------------------------------
// verify metric --weights wx,wy,wz
// ---------------------------------------------------------------------------

inline std::vector<VerificationReport> run_metric_checks(const MetricWeights& w,
                                                         const CheckOptions& opt) {
    require_valid(w);
    std::vector<VerificationReport> out;
    const long long fd_samples = std::max<long long>(200, opt.samples / 20);
    const double lap_slope = 3.0 / w.wx + 4.0 / w.wy;

    {
        // Closed gradient vs finite differences in the weighted metric.
        Stopwatch sw;
        const unsigned long long seed = opt.seed;
        HaarSampler sampler(seed);
        const ScalarField f = F_scalar_field(false);
        double worst = 0.0;
        for (long long k = 0; k < fd_samples; ++k) {
            const Sp2Element q = sampler.next();
            const Sp2Algebra diff = grad_F_closed(q, w).xi - numeric_gradient(f, q, w).xi;
            worst = std::max(worst, norm(diff, w));
        }
        out.push_back(make_report("metric.gradient.closed_vs_fd", fd_samples, seed,
                                  detail::tol_or(opt, 1e-6), worst, sw.seconds(), w));
    }

    {
        // The Laplacian stays linear in F for every diagonal metric:
        // lap F = -(3/wx + 4/wy) F.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 1;
        HaarSampler sampler(seed);
        const ScalarField f = F_scalar_field(true);
        const detail::LaplacianWorkspace ws(w, 1e-5, false);
        double worst = 0.0;
        for (long long k = 0; k < fd_samples; ++k) {
            const Sp2Element q = sampler.next();
            const double lap = detail::laplacian_with_workspace(f, q, w, ws);
            worst = std::max(worst, std::abs(lap + lap_slope * F_eval(q)));
        }
        out.push_back(make_report("metric.laplacian.linear_in_f", fd_samples, seed,
                                  detail::tol_or(opt, 1e-3), worst, sw.seconds(), w,
                                  {"reference slope -(3/wx + 4/wy) = " + fmt(-lap_slope)}));
    }

    DependenceReport grad_dep;
    DependenceReport lap_dep;
    {
        // Observed dependence structure under this metric.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 2;
        HaarSampler sampler(seed);
        std::vector<std::pair<double, double>> grad_pairs;
        std::vector<std::pair<double, double>> lap_pairs;
        const ScalarField f = F_scalar_field(true);
        const detail::LaplacianWorkspace ws(w, 1e-5, false);
        for (long long k = 0; k < opt.samples; ++k) {
            const Sp2Element q = sampler.next();
            const double t = F_eval(q);
            if (std::abs(t) > 0.95) continue;
            grad_pairs.emplace_back(t, grad_F_norm2_closed(q, w));
            lap_pairs.emplace_back(t, detail::laplacian_with_workspace(f, q, w, ws));
        }
        grad_dep = dependence_test(grad_pairs, 32, 1e-6);
        lap_dep = dependence_test(lap_pairs, 32, 1e-3);
        out.push_back(make_report(
            "metric.dependence.observed", static_cast<long long>(grad_pairs.size()), seed, 0.0,
            0.0, sw.seconds(), w,
            {detail::dependence_note("gradient", grad_dep),
             detail::dependence_note("laplacian", lap_dep),
             std::string("transnormal: ") + (grad_dep.pass ? "yes" : "no"),
             std::string("isoparametric: ") + (grad_dep.pass && lap_dep.pass ? "yes" : "no")}));
    }

    {
        // Verdict against the derived expectation: transnormality holds iff
        // wx = wy (then |grad F|^2 = (1 - F^2)/wy), while the Laplacian is
        // linear in F for every diagonal metric.
        const bool expect_transnormal = std::abs(w.wx - w.wy) < 1e-12;
        double residual = 0.0;
        if (grad_dep.pass != expect_transnormal) residual += 1.0;
        if (!lap_dep.pass) residual += 1.0;
        out.push_back(make_report(
            "metric.isoparametric.expectation", opt.samples, opt.seed + 2, 0.0, residual, 0.0, w,
            {std::string("expected transnormal: ") + (expect_transnormal ? "yes" : "no"),
             std::string("observed transnormal: ") + (grad_dep.pass ? "yes" : "no"),
             "expected Laplacian linear in F: yes",
             std::string("observed Laplacian functional: ") + (lap_dep.pass ? "yes" : "no"),
             std::string("isoparametric for these weights: ") +
                 (grad_dep.pass && lap_dep.pass ? "yes" : "no")}));
    }

    return out;
}

// ---------------------------------------------------------------------------
// munzner
// ---------------------------------------------------------------------------

namespace detail {

inline std::string ring_name(CoefficientRing r) {
    return r == CoefficientRing::Integers ? "Z" : "Z/2";
}

}  // namespace detail

/// Single-table report for the CLI. Throws InconsistentFocalData upward.
inline VerificationReport munzner_report(const FocalData& d) {
    Stopwatch sw;
    const CohomologyTable t = munzner_cohomology(d);
    std::vector<std::string> notes;
    notes.push_back("ring " + detail::ring_name(t.ring) + ", mu = " + std::to_string(t.mu) +
                    ", alpha = " + std::to_string(t.alpha));
    for (int q = 0; q <= t.n; ++q)
        notes.push_back("q=" + std::to_string(q) + ": M1 " +
                        std::to_string(t.focal_plus[static_cast<std::size_t>(q)]) + ", M-1 " +
                        std::to_string(t.focal_minus[static_cast<std::size_t>(q)]) + ", M " +
                        std::to_string(t.hypersurface[static_cast<std::size_t>(q)]));
    if (t.congruence_overlap) notes.push_back("warning: congruence overlap hit");
    if (t.n == 3) {
        try {
            const S4Classification c = classify_s4_case(t);
            notes.push_back("case: focal pair " + c.focal_pair + ", minimal hypersurface " +
                            c.minimal_hypersurface);
        } catch (const Unclassified&) {
            notes.push_back("case: not one of the realizable focal pairs");
        }
    }
    return make_report("munzner.table.n" + std::to_string(d.n) + ".m" + std::to_string(d.m1) +
                           "." + std::to_string(d.m_1),
                       1, 0, 0.0, 0.0, sw.seconds(), {}, std::move(notes));
}

/// Invariant battery over the combinatorial inputs.
inline std::vector<VerificationReport> run_munzner_battery() {
    std::vector<VerificationReport> out;

    {
        // The three realizable n = 3 tables, against hand-checked ranks.
        Stopwatch sw;
        double residual = 0.0;
        const auto expect = [&](const FocalData& d, CoefficientRing ring,
                                std::vector<int> plus, std::vector<int> minus,
                                std::vector<int> hyper) {
            const CohomologyTable t = munzner_cohomology(d);
            if (t.ring != ring) residual += 1.0;
            if (t.focal_plus != plus) residual += 1.0;
            if (t.focal_minus != minus) residual += 1.0;
            if (t.hypersurface != hyper) residual += 1.0;
            if (t.congruence_overlap) residual += 1.0;
        };
        expect({3, 1, 1, false}, CoefficientRing::IntegersMod2, {1, 1, 1, 0}, {1, 1, 1, 0},
               {1, 2, 2, 1});
        expect({3, 2, 1, true}, CoefficientRing::Integers, {1, 1, 0, 0}, {1, 0, 1, 0},
               {1, 1, 1, 1});
        expect({3, 3, 3, true}, CoefficientRing::Integers, {1, 0, 0, 0}, {1, 0, 0, 0},
               {1, 0, 0, 1});
        out.push_back(make_report("munzner.tables.n3", 3, 0, 0.0, residual, sw.seconds(), {},
                                  {"focal pairs (1,1), (2,1), (3,3)"}));
    }

    {
        // Rejection of (3, 2, 2): 2n/mu = 3/2.
        Stopwatch sw;
        double residual = 1.0;
        try {
            munzner_cohomology({3, 2, 2, false});
        } catch (const InconsistentFocalData&) {
            residual = 0.0;
        }
        out.push_back(make_report("munzner.reject.322", 1, 0, 0.0, residual, sw.seconds(), {},
                                  {"2n/mu non-integer must raise InconsistentFocalData"}));
    }

    {
        // Exhaustive scan n <= 8: accepted tables satisfy the structural
        // invariants; every rejection comes from the integrality test.
        Stopwatch sw;
        double residual = 0.0;
        long long accepted = 0;
        for (int n = 1; n <= 8; ++n) {
            for (int m1 = 1; m1 <= n; ++m1) {
                for (int m_1 = 1; m_1 <= m1; ++m_1) {
                    const bool divisible = (2 * n) % (m1 + m_1) == 0;
                    try {
                        const CohomologyTable t = munzner_cohomology({n, m1, m_1, false});
                        if (!divisible) residual += 1.0;
                        ++accepted;
                        if (t.alpha * (m1 + m_1) != 2 * n) residual += 1.0;
                        if (t.focal_plus[0] != 1 || t.focal_minus[0] != 1 ||
                            t.hypersurface[0] != 1)
                            residual += 1.0;
                        // Rank symmetry of M is forced by duality only when the
                        // decomposition can exist at all; combinatorial data with
                        // alpha odd and unequal multiplicities (first case: n = 6,
                        // m = (3, 1)) passes the integrality test yet yields an
                        // asymmetric table, certifying no such hypersurface exists.
                        if (t.alpha % 2 == 0 || m1 == m_1)
                            for (int q = 0; q <= n; ++q)
                                if (t.hypersurface[static_cast<std::size_t>(q)] !=
                                    t.hypersurface[static_cast<std::size_t>(n - q)])
                                    residual += 1.0;
                        if (t.congruence_overlap) residual += 1.0;
                    } catch (const InconsistentFocalData&) {
                        if (divisible) residual += 1.0;
                    }
                }
            }
        }
        out.push_back(make_report("munzner.scan.n8", accepted, 0, 0.0, residual, sw.seconds(),
                                  {},
                                  {"integrality, H^0 ranks, no overlap, rank symmetry of M "
                                   "where duality applies (even alpha or equal multiplicities)"}));
    }

    {
        // Classification of the three tables, plus rejection of a mismatch.
        Stopwatch sw;
        double residual = 0.0;
        const auto label = [&](const FocalData& d) { return classify_s4_case(munzner_cohomology(d)); };
        if (label({3, 3, 3, true}).minimal_hypersurface != "S^3") residual += 1.0;
        if (label({3, 2, 1, true}).focal_pair != "(S^1, S^2)") residual += 1.0;
        if (label({3, 1, 1, false}).focal_pair != "(RP^2, RP^2)") residual += 1.0;
        try {
            label({3, 1, 1, true});
            residual += 1.0;
        } catch (const Unclassified&) {
        }
        out.push_back(make_report("munzner.classify", 4, 0, 0.0, residual, sw.seconds(), {},
                                  {"three realizable cases plus one Unclassified"}));
    }

    return out;
}

// ---------------------------------------------------------------------------
// profile / geodesic
// ---------------------------------------------------------------------------

struct ProfileResult {
    LevelProfilePair profile;
    std::vector<ProfileRow> rows;
    std::optional<double> minimal;
    std::vector<VerificationReport> reports;
};

inline ProfileResult run_profile(const std::string& which, bool minimal,
                                 const CheckOptions& opt) {
    ProfileResult res;
    int codim_minus = 0, codim_plus = 0;
    if (which == "sp2") {
        res.profile = sp2_profile();
        codim_minus = codim_plus = 7;
    } else if (which == "gm") {
        res.profile = gm_profile();
        codim_minus = codim_plus = 7;
    } else if (which == "s3") {
        res.profile = s3_profile();
        codim_minus = 1;
        codim_plus = 3;
    } else {
        throw std::domain_error("profile: unknown case (use sp2, gm, or s3)");
    }

    Stopwatch sw;
    const double inset = 0.005 * (res.profile.beta - res.profile.alpha);
    const double lo = res.profile.alpha + inset;
    const double hi = res.profile.beta - inset;
    for (int i = 0; i < 201; ++i) {
        const double t = lo + (hi - lo) * i / 200.0;
        ProfileRow row;
        row.t = t;
        row.b = res.profile.b(t);
        row.a = res.profile.a(t);
        row.h = mean_curvature_profile(res.profile, t);
        res.rows.push_back(row);
    }

    const auto [rmin, rplus] = focal_codim_check(res.profile, codim_minus, codim_plus);
    res.reports.push_back(make_report(
        "profile." + which + ".focal_identities", 2, opt.seed, detail::tol_or(opt, 1e-8),
        std::max(rmin, rplus), sw.seconds(), {},
        {"codimensions (" + std::to_string(codim_minus) + ", " + std::to_string(codim_plus) +
             ")",
         "a(alpha) - b'(alpha) k/2 = " + fmt(rmin), "a(beta) - b'(beta) k/2 = " + fmt(rplus)}));

    if (minimal) {
        Stopwatch sw2;
        const double t0 = minimal_level(res.profile, codim_minus, codim_plus);
        res.minimal = t0;
        res.reports.push_back(make_report(
            "profile." + which + ".minimal_level", 1, opt.seed, detail::tol_or(opt, 1e-10),
            std::abs(mean_curvature_profile(res.profile, t0)), sw2.seconds(), {},
            {"t0 = " + fmt(t0)}));
    }
    return res;
}

inline std::vector<VerificationReport> run_geodesic(double t0, int sign,
                                                    const CheckOptions& opt) {
    if (sign != 1 && sign != -1) throw std::domain_error("geodesic: sign must be +1 or -1");
    if (std::abs(t0) >= 1.0) throw std::domain_error("geodesic: t0 must lie in (-1, 1)");
    const MetricWeights w{};
    Stopwatch sw;
    const Sp2Element start = flow_to_level(haar_sample(opt.seed), t0);
    const NormalGeodesicTrace tr = normal_geodesic_trace(start, sign);
    const double expect_arc = std::numbers::pi / 2.0 - sign * std::asin(t0);
    const double elapsed = sw.seconds();

    std::vector<VerificationReport> out;
    out.push_back(make_report("geodesic.arc_length", 1, opt.seed, detail::tol_or(opt, 1e-4),
                              std::abs(tr.arc_length - expect_arc), elapsed, w,
                              {"arc length " + fmt(tr.arc_length) + " (expected " +
                               fmt(expect_arc) + ")"}));
    out.push_back(make_report("geodesic.endpoint", 1, opt.seed, detail::tol_or(opt, 1e-6),
                              detail::focal_structure_residual(tr.endpoint), elapsed, w,
                              {std::string("arrived at ") +
                               (tr.focal == FocalClass::Plus ? "M(+1)" : "M(-1)")}));
    out.push_back(make_report("geodesic.sine_law", 1, opt.seed, detail::tol_or(opt, 1e-4),
                              tr.sine_law_residual, elapsed, w));
    out.push_back(make_report("geodesic.parallel", 1, opt.seed, detail::tol_or(opt, 1e-6),
                              detail::geodesic_parallel_residual(tr.path), elapsed, w));
    return out;
}

// ---------------------------------------------------------------------------
// conformal battery (exercised by verify sp2-level tests and acceptance)
// ---------------------------------------------------------------------------

inline std::vector<VerificationReport> run_conformal_checks(const CheckOptions& opt) {
    std::vector<VerificationReport> out;
    const MetricWeights w{};
    const auto u = [](double t) { return t; };
    const auto up = [](double) { return 1.0; };

    {
        // Deformed-profile predictions vs all-numeric deformed-metric data.
        Stopwatch sw;
        const unsigned long long seed = opt.seed;
        HaarSampler sampler(seed);
        double grad_worst = 0.0, lap_worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Sp2Element q = sampler.next();
            const ConformalCheckResult r = conformal_field_check(q, u, up, 10);
            grad_worst = std::max(grad_worst, r.gradient_residual);
            lap_worst = std::max(lap_worst, r.laplacian_residual);
        }
        const double elapsed = sw.seconds();
        out.push_back(make_report("conformal.profile.gradient", 50, seed,
                                  detail::tol_or(opt, 1e-4), grad_worst, elapsed, w,
                                  {"u(t) = t, n = 10"}));
        out.push_back(make_report("conformal.profile.laplacian", 50, seed,
                                  detail::tol_or(opt, 1e-4), lap_worst, elapsed, w,
                                  {"u(t) = t, n = 10"}));
    }

    {
        // Hessian transformation law at random points and directions.
        Stopwatch sw;
        const unsigned long long seed = opt.seed + 1;
        HaarSampler sampler(seed);
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Sp2Element q = sampler.next();
            const Sp2Tangent x{q, detail::random_algebra(rng)};
            const Sp2Tangent y{q, detail::random_algebra(rng)};
            worst = std::max(worst, hessian_deform_check(q, x, y, u, up));
        }
        out.push_back(make_report("conformal.hessian.deform", 20, seed,
                                  detail::tol_or(opt, 1e-4), worst, sw.seconds(), w,
                                  {"u(t) = t"}));
    }

    return out;
}

}  // namespace sp2iso
