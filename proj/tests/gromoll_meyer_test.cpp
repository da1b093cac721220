#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sp2iso/gromoll_meyer.hpp"
#include "sp2iso/transnormal.hpp"

using sp2iso::complete_row;
using sp2iso::F_eval;
using sp2iso::flow_to_level;
using sp2iso::HaarSampler;
using sp2iso::Mat2H;
using sp2iso::normal_form;
using sp2iso::NormalForm;
using sp2iso::OrbitPoint;
using sp2iso::Quaternion;
using sp2iso::s3_act;
using sp2iso::Sp2Algebra;
using sp2iso::Sp2Element;
using sp2iso::Sp2Tangent;

namespace {

constexpr double kPhiWitness = 0.37712361663282534;  // 4 sqrt(2) / 15

Quaternion random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q{g(rng), g(rng), g(rng), g(rng)};
    return q / norm(q);
}

Quaternion random_unit_imaginary(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q{0.0, g(rng), g(rng), g(rng)};
    return q / norm(q);
}

Sp2Algebra random_algebra(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return Sp2Algebra{Quaternion{0.0, g(rng), g(rng), g(rng)},
                      Quaternion{g(rng), g(rng), g(rng), g(rng)},
                      Quaternion{0.0, g(rng), g(rng), g(rng)}};
}

Sp2Element witness_point() {
    const double r2 = 1.0 / std::sqrt(2.0);
    return complete_row(Quaternion{0.0, r2, 0.0, 0.0}, Quaternion{0.5, 0.5, 0.0, 0.0});
}

// Left-trivialized velocity of s -> curve(s) at 0 by central differences.
Sp2Algebra fd_velocity(const std::function<Sp2Element(double)>& curve, double h = 1e-6) {
    const Mat2H dq = (curve(h).matrix() - curve(-h).matrix()) * (1.0 / (2.0 * h));
    return skew_project(mul(star(curve(0.0).matrix()), dq));
}

}  // namespace

TEST(Action, GroupLawIdentityAndInvariance) {
    HaarSampler sampler(81);
    std::mt19937_64 rng(81);
    for (int n = 0; n < 30; ++n) {
        const Sp2Element m = sampler.next();
        const Quaternion q1 = random_unit(rng);
        const Quaternion q2 = random_unit(rng);
        EXPECT_LT(frobenius_dist(s3_act(q1, s3_act(q2, m)), s3_act(q1 * q2, m)), 1e-12);
        EXPECT_LT(frobenius_dist(s3_act(Quaternion::one(), m), m), 1e-15);
        EXPECT_NEAR(F_eval(s3_act(q1, m)), F_eval(m), 1e-14);
    }
    EXPECT_THROW(s3_act(Quaternion{1.0, 1.0, 0.0, 0.0}, sampler.next()), std::domain_error);
}

TEST(Action, PushforwardMatchesDifferencedCurveAndPreservesMetric) {
    HaarSampler sampler(82);
    std::mt19937_64 rng(82);
    for (int n = 0; n < 20; ++n) {
        const Sp2Element m = sampler.next();
        const Quaternion g = random_unit(rng);
        const Sp2Algebra xi = random_algebra(rng);
        const Sp2Tangent push = s3_act_pushforward(g, Sp2Tangent{m, xi});
        const Sp2Algebra num = fd_velocity([&](double s) {
            return s3_act(g, Sp2Element(mul(m.matrix(), expm(xi.matrix() * s))));
        });
        EXPECT_LT(norm(push.xi - num), 1e-8);

        const Sp2Algebra eta = random_algebra(rng);
        const Sp2Tangent pe = s3_act_pushforward(g, Sp2Tangent{m, eta});
        for (const sp2iso::MetricWeights w :
             {sp2iso::MetricWeights{}, sp2iso::MetricWeights{1.0, 2.0, 1.0}})
            EXPECT_NEAR(inner(push.xi, pe.xi, w), inner(xi, eta, w), 1e-12);
    }
}

TEST(Action, OrbitDirectionsMatchDifferencedOrbitCurves) {
    HaarSampler sampler(83);
    std::mt19937_64 rng(83);
    for (int n = 0; n < 20; ++n) {
        const Sp2Element m = sampler.next();
        const Quaternion x = random_unit_imaginary(rng);
        const Sp2Algebra nu = orbit_direction(m, x);
        const Sp2Algebra num = fd_velocity([&](double s) {
            const Quaternion g = exp_pure(x * s);
            return s3_act(g, m);
        });
        EXPECT_LT(norm(nu - num), 1e-8);
        EXPECT_LT(std::abs(inner(nu, sp2iso::grad_F_closed(m).xi)), 1e-12);
    }
}

TEST(NormalFormConstruction, CanonicalStructureAndConjugationConsistency) {
    std::mt19937_64 rng(84);
    for (int n = 0; n < 200; ++n) {
        Quaternion a = random_unit(rng);
        Quaternion b = random_unit(rng);
        const double s = std::sqrt(norm2(a) + norm2(b));
        a = a / s;
        b = b / s;
        const NormalForm nf = normal_form(a, b);
        EXPECT_NEAR(norm(nf.q), 1.0, 1e-12);
        EXPECT_LT(norm(nf.q * a * conj(nf.q) - nf.a), 1e-14);
        EXPECT_LT(norm(nf.q * b * conj(nf.q) - nf.b), 1e-14);
        EXPECT_NEAR(nf.b.y, 0.0, 1e-12);
        EXPECT_NEAR(nf.b.z, 0.0, 1e-12);
        EXPECT_GE(nf.b.x, -1e-15);
        EXPECT_NEAR(nf.a.z, 0.0, 1e-12);
        EXPECT_GE(nf.a.y, -1e-15);
        EXPECT_NEAR(re(nf.a), re(a), 1e-14);
        EXPECT_NEAR(norm(nf.a), norm(a), 1e-14);
    }
}

TEST(NormalFormConstruction, RealBFallsBackToRotatingA) {
    std::mt19937_64 rng(85);
    for (int n = 0; n < 50; ++n) {
        Quaternion a = random_unit(rng) * 0.8;
        const Quaternion b{std::sqrt(1.0 - norm2(a)), 0.0, 0.0, 0.0};
        const NormalForm nf = normal_form(a, b);
        EXPECT_LT(norm(nf.b - b), 1e-14);
        EXPECT_NEAR(nf.a.y, 0.0, 1e-12);
        EXPECT_NEAR(nf.a.z, 0.0, 1e-12);
        EXPECT_GE(nf.a.x, -1e-15);
    }
}

TEST(Orbits, EqualityDetectsOrbitsAndRejectsUnnormalizedPoints) {
    HaarSampler sampler(86);
    std::mt19937_64 rng(86);
    for (int n = 0; n < 15; ++n) {
        const Sp2Element m = sampler.next();
        const OrbitPoint p(m);
        const OrbitPoint same(s3_act(random_unit(rng), m));
        EXPECT_TRUE(orbit_equal(p, same));
        const OrbitPoint other(sampler.next());
        EXPECT_FALSE(orbit_equal(p, other));
    }
    OrbitPoint raw;
    raw.representative = sampler.next();
    EXPECT_THROW(orbit_equal(raw, OrbitPoint(sampler.next())), std::domain_error);
}

TEST(Gram, ClosedFormWitnesses) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const sp2iso::GramData gd = sp2iso::gram_closed(r2, 0.0, 0.5, 0.5);
    EXPECT_NEAR(gd.g(0, 0), 0.75, 1e-15);
    EXPECT_NEAR(gd.g(1, 1), 3.75, 1e-15);
    EXPECT_NEAR(gd.g(2, 2), 3.75, 1e-15);
    EXPECT_NEAR(gd.g(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(gd.e, 45.0 / 16.0, 1e-14);
    EXPECT_NEAR(gd.f_scalar, 3.75, 1e-15);

    const sp2iso::GramData pole = sp2iso::gram_closed(1.0, 0.0, 0.0, 0.0);
    EXPECT_NEAR(pole.g(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(pole.g(1, 1), 5.0, 1e-15);
    EXPECT_NEAR(pole.g(2, 2), 5.0, 1e-15);
}

TEST(Gram, DirectInnerProductsMatchClosedFormOnZeroLevel) {
    std::mt19937_64 rng(87);
    for (int n = 0; n < 100; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        const sp2iso::GramData num = sp2iso::gram_matrix(p.q);
        const sp2iso::GramData closed = sp2iso::gram_closed(p.a1, p.a2, p.b0, p.b1);
        EXPECT_LT((num.g - closed.g).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((num.g * num.inverse - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(Gram, SingularInputIsRejected) {
    try {
        sp2iso::gram_closed(1.0, 0.0, 1.0, 0.0);
        FAIL() << "expected std::runtime_error";
    } catch (const std::runtime_error& err) {
        EXPECT_NE(std::string(err.what()).find("singular"), std::string::npos);
    }
}

TEST(Phi, ClosedFormWitnessValues) {
    const double r2 = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(sp2iso::phi_closed(r2, 0.0, 0.5, 0.5), kPhiWitness, 1e-15);
    EXPECT_NEAR(sp2iso::phi_closed(r2, 0.0, -0.5, 0.5), -kPhiWitness, 1e-15);
    EXPECT_NEAR(sp2iso::phi_closed(0.6, 0.0, 0.0, 0.8), 0.0, 1e-15);
    EXPECT_THROW(sp2iso::phi_closed(1.0, 0.0, 1.0, 0.0), std::domain_error);

    std::mt19937_64 rng(88);
    for (int n = 0; n < 50; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        EXPECT_NEAR(sp2iso::phi_closed(p.a1, p.a2, -p.b0, p.b1),
                    -sp2iso::phi_closed(p.a1, p.a2, p.b0, p.b1), 1e-13);
    }
}

TEST(Phi, HessianIdentityMatchesClosedFormOnZeroLevel) {
    EXPECT_NEAR(sp2iso::phi_numeric(witness_point()), kPhiWitness, 1e-13);
    std::mt19937_64 rng(89);
    for (int n = 0; n < 100; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        EXPECT_NEAR(sp2iso::phi_numeric(p.q), sp2iso::phi_closed(p.a1, p.a2, p.b0, p.b1),
                    1e-10);
    }
}

TEST(Phi, FrameDerivativeDefinitionAgrees) {
    std::mt19937_64 rng(90);
    for (int n = 0; n < 10; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        EXPECT_NEAR(sp2iso::phi_frame_derivative(p.q), sp2iso::phi_numeric(p.q), 1e-6);
    }
}

TEST(Phi, InvariantAlongOrbitsAndUnderFlow) {
    HaarSampler sampler(91);
    std::mt19937_64 rng(91);
    for (int n = 0; n < 20; ++n) {
        const Sp2Element m = sampler.next();
        const double phi = sp2iso::phi_numeric(m);
        for (int k = 0; k < 10; ++k)
            EXPECT_NEAR(sp2iso::phi_numeric(s3_act(random_unit(rng), m)), phi, 1e-10);
    }
}

TEST(Quotient, LaplacianCombinesUpstairsTraceAndPhi) {
    std::mt19937_64 rng(92);
    const sp2iso::ScalarField f = sp2iso::F_scalar_field(false);
    for (int n = 0; n < 5; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        const double upstairs = numeric_laplacian(f, p.q);
        const double quotient = sp2iso::quotient_laplacian(p.q);
        EXPECT_NEAR(quotient - sp2iso::phi_frame_derivative(p.q), upstairs, 1e-3);
        EXPECT_NEAR(quotient, -7.0 * F_eval(p.q) + sp2iso::phi_numeric(p.q), 1e-13);
    }
}

TEST(Quotient, MeanCurvatureOnZeroLevelIsMinusPhi) {
    std::mt19937_64 rng(93);
    double lo = 1e300, hi = -1e300;
    for (int n = 0; n < 100; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng);
        const double mc = sp2iso::mean_curvature_gm(p.q);
        EXPECT_NEAR(mc, -sp2iso::phi_numeric(p.q), 1e-10);
        lo = std::min(lo, mc);
        hi = std::max(hi, mc);
    }
    EXPECT_GT(hi - lo, 0.3);
    EXPECT_THROW(sp2iso::mean_curvature_gm(complete_row(Quaternion::one(), Quaternion::zero())),
                 std::domain_error);
}

TEST(Quotient, ZeroLevelSamplerProducesNormalFormPoints) {
    std::mt19937_64 rng1(94), rng2(94);
    for (int n = 0; n < 20; ++n) {
        const auto p = sp2iso::sample_zero_level_normal_form(rng1);
        const auto r = sp2iso::sample_zero_level_normal_form(rng2);
        EXPECT_EQ(frobenius_dist(p.q, r.q), 0.0);
        EXPECT_NEAR(p.a1 * p.a1 + p.a2 * p.a2 + p.b0 * p.b0 + p.b1 * p.b1, 1.0, 1e-12);
        EXPECT_EQ(F_eval(p.q), 0.0);
        EXPECT_LT(unitarity_residual(p.q.matrix()), 1e-12);
    }
}
