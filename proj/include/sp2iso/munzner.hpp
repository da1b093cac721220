#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sp2iso {

/// Combinatorial input for the cohomology computation: an isoparametric
/// hypersurface M^n inside a sphere-like space decomposes it into two disk
/// bundles over the focal manifolds; m1 and m_1 are the focal codimensions
/// minus one, with 1 <= m_1 <= m1 <= n.
struct FocalData {
    int n = 0;
    int m1 = 0;
    int m_1 = 0;
    bool both_orientable = false;
};

enum class CoefficientRing { Integers, IntegersMod2 };

/// Per-degree ranks of H^q for the two focal manifolds and the hypersurface,
/// q = 0..n, over the indicated coefficient ring. Only ranks are stored; the
/// decomposition pins nothing finer.
struct CohomologyTable {
    CoefficientRing ring = CoefficientRing::IntegersMod2;
    int n = 0;
    int mu = 0;
    int alpha = 0;
    std::vector<int> focal_plus;   ///< ranks of H^q(M_1)
    std::vector<int> focal_minus;  ///< ranks of H^q(M_{-1})
    std::vector<int> hypersurface; ///< ranks of H^q(M)
    bool congruence_overlap = false;
};

/// The focal data cannot arise from a disk-bundle decomposition.
struct InconsistentFocalData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A cohomology table matching none of the realizable homotopy-4-sphere cases.
struct Unclassified : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// H^q(M_k) has rank one for q = 0 (mod mu) and another one for
/// q = m_other (mod mu), within 0 <= q < n. The two congruences coincide only
/// if mu divides m_other, which the constraint m_other < mu rules out; the
/// branch is still taken literally and flagged if ever reached.
inline int focal_rank(int q, int mu, int m_other, bool& overlap) {
    int rank = 0;
    if (q % mu == 0) ++rank;
    if (q % mu == m_other % mu) ++rank;
    if (rank == 2) overlap = true;
    return rank;
}

}  // namespace detail

/// Computes the focal and hypersurface cohomology ranks forced by the
/// disk-bundle decomposition. The coefficient ring is the integers when both
/// focal manifolds are orientable and Z/2 otherwise; 2n must be divisible by
/// mu = m1 + m_1, else the data is rejected.
inline CohomologyTable munzner_cohomology(const FocalData& d) {
    if (d.n < 1 || d.m_1 < 1 || d.m_1 > d.m1 || d.m1 > d.n)
        throw InconsistentFocalData("focal data violates 1 <= m_1 <= m1 <= n");
    const int mu = d.m1 + d.m_1;
    if ((2 * d.n) % mu != 0)
        throw InconsistentFocalData("2n/mu is not an integer for mu = " + std::to_string(mu));
    CohomologyTable t;
    t.ring = d.both_orientable ? CoefficientRing::Integers : CoefficientRing::IntegersMod2;
    t.n = d.n;
    t.mu = mu;
    t.alpha = 2 * d.n / mu;
    t.focal_plus.assign(static_cast<std::size_t>(d.n) + 1, 0);
    t.focal_minus.assign(static_cast<std::size_t>(d.n) + 1, 0);
    t.hypersurface.assign(static_cast<std::size_t>(d.n) + 1, 0);
    for (int q = 0; q < d.n; ++q) {
        t.focal_plus[static_cast<std::size_t>(q)] =
            detail::focal_rank(q, mu, d.m_1, t.congruence_overlap);
        t.focal_minus[static_cast<std::size_t>(q)] =
            detail::focal_rank(q, mu, d.m1, t.congruence_overlap);
    }
    t.hypersurface[0] = 1;
    t.hypersurface[static_cast<std::size_t>(d.n)] = 1;
    for (int q = 1; q < d.n; ++q)
        t.hypersurface[static_cast<std::size_t>(q)] =
            t.focal_plus[static_cast<std::size_t>(q)] + t.focal_minus[static_cast<std::size_t>(q)];
    return t;
}

/// Geometric labels for the three focal-pair cases realizable on a homotopy
/// 4-sphere.
struct S4Classification {
    std::string focal_pair;
    std::string minimal_hypersurface;
};

/// Matches an n = 3 cohomology table against the three realizable cases:
/// point pair, (circle, sphere), or projective-plane pair.
inline S4Classification classify_s4_case(const CohomologyTable& t) {
    if (t.n != 3) throw std::domain_error("classify_s4_case: table must have n = 3");
    const std::vector<int>& p = t.focal_plus;
    const std::vector<int>& m = t.focal_minus;
    const auto focal_is = [](const std::vector<int>& v, int r0, int r1, int r2) {
        return v[0] == r0 && v[1] == r1 && v[2] == r2 && v[3] == 0;
    };
    if (t.ring == CoefficientRing::Integers && focal_is(p, 1, 0, 0) && focal_is(m, 1, 0, 0))
        return {"(pt, pt)", "S^3"};
    if (t.ring == CoefficientRing::Integers && focal_is(p, 1, 1, 0) && focal_is(m, 1, 0, 1))
        return {"(S^1, S^2)", "S^1 x S^2"};
    if (t.ring == CoefficientRing::IntegersMod2 && focal_is(p, 1, 1, 1) && focal_is(m, 1, 1, 1))
        return {"(RP^2, RP^2)", "SO(3)/(Z_2 + Z_2)"};
    throw Unclassified("cohomology table matches no realizable homotopy-4-sphere case");
}

}  // namespace sp2iso
