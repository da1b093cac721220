#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "sp2iso/quaternion.hpp"

namespace sp2iso {

/// 2x2 matrix with quaternion entries, row layout [[a, b], [c, d]].
struct Mat2H {
    Quaternion a, b, c, d;

    static constexpr Mat2H identity() {
        return {Quaternion::one(), Quaternion::zero(), Quaternion::zero(), Quaternion::one()};
    }

    constexpr Mat2H operator+(const Mat2H& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    constexpr Mat2H operator-(const Mat2H& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    constexpr Mat2H operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    constexpr Mat2H& operator+=(const Mat2H& o) {
        a += o.a; b += o.b; c += o.c; d += o.d;
        return *this;
    }
};

constexpr Mat2H operator*(double s, const Mat2H& m) { return m * s; }

constexpr Mat2H mul(const Mat2H& p, const Mat2H& q) {
    return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
}

constexpr Mat2H operator*(const Mat2H& p, const Mat2H& q) { return mul(p, q); }

/// Conjugate transpose.
constexpr Mat2H star(const Mat2H& m) { return {conj(m.a), conj(m.c), conj(m.b), conj(m.d)}; }

constexpr double frobenius_norm2(const Mat2H& m) {
    return norm2(m.a) + norm2(m.b) + norm2(m.c) + norm2(m.d);
}

inline double frobenius_norm(const Mat2H& m) { return std::sqrt(frobenius_norm2(m)); }

inline double frobenius_dist(const Mat2H& p, const Mat2H& q) { return frobenius_norm(p - q); }

/// Residual of the row-orthonormality condition Q Q* = I.
inline double unitarity_residual(const Mat2H& m) {
    return frobenius_dist(mul(m, star(m)), Mat2H::identity());
}

/// Matrix exponential by scaling-and-squaring on the quaternionic entries.
inline Mat2H expm(const Mat2H& m) {
    const double n = frobenius_norm(m);
    int squarings = 0;
    if (n > 0.25) squarings = static_cast<int>(std::ceil(std::log2(n / 0.25)));
    const double scale = std::ldexp(1.0, -squarings);
    const Mat2H b = m * scale;
    Mat2H sum = Mat2H::identity();
    Mat2H term = Mat2H::identity();
    for (int r = 1; r <= 22; ++r) {
        term = mul(term, b) * (1.0 / r);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = mul(sum, sum);
    return sum;
}

namespace detail {

/// Row Gram-Schmidt. Throws std::domain_error on (numerically) dependent rows.
inline Mat2H gram_schmidt_rows(const Mat2H& m) {
    Quaternion a = m.a, b = m.b;
    const double n1 = std::sqrt(norm2(a) + norm2(b));
    if (n1 < 1e-12) throw std::domain_error("retract: first row is numerically zero");
    a = a / n1;
    b = b / n1;
    Quaternion c = m.c, d = m.d;
    // Left coefficient <row2, row1> = c conj(a) + d conj(b).
    const Quaternion lam = c * conj(a) + d * conj(b);
    c = c - lam * a;
    d = d - lam * b;
    const double n2 = std::sqrt(norm2(c) + norm2(d));
    if (n2 < 1e-12) throw std::domain_error("retract: rows are numerically dependent");
    return {a, b, c / n2, d / n2};
}

}  // namespace detail

/// Element of the compact symplectic group Sp(2): 2x2 quaternionic Q with Q Q* = I.
/// Construction retracts the input onto the group by row Gram-Schmidt, so the
/// invariant holds within 1e-12 for any input within retraction range.
class Sp2Element {
  public:
    Sp2Element() : q_(Mat2H::identity()) {}
    explicit Sp2Element(const Mat2H& m) : q_(detail::gram_schmidt_rows(m)) {}

    const Mat2H& matrix() const { return q_; }
    const Quaternion& a() const { return q_.a; }
    const Quaternion& b() const { return q_.b; }
    const Quaternion& c() const { return q_.c; }
    const Quaternion& d() const { return q_.d; }

  private:
    Mat2H q_;
};

inline double frobenius_dist(const Sp2Element& p, const Sp2Element& q) {
    return frobenius_dist(p.matrix(), q.matrix());
}

/// Retraction onto Sp(2) (row Gram-Schmidt). Idempotent on elements of the group.
inline Sp2Element retract(const Mat2H& m) { return Sp2Element(m); }

/// Completes a unit first row (a, b) to a group element.
/// Throws std::domain_error unless |a|^2 + |b|^2 = 1 within 1e-12.
inline Sp2Element complete_row(const Quaternion& a, const Quaternion& b) {
    if (std::abs(norm2(a) + norm2(b) - 1.0) > 1e-12)
        throw std::domain_error("complete_row: first row is not unit length");
    // Seed the second row with whichever coordinate axis is farther from span{(a,b)}.
    Mat2H m{a, b, Quaternion::zero(), Quaternion::one()};
    if (norm2(b) > 0.5) {
        m.c = Quaternion::one();
        m.d = Quaternion::zero();
    }
    return Sp2Element(m);
}

/// Element of the Lie algebra sp(2), stored left-trivialized as the triple
/// (x, y, z) of the matrix [[x, y], [-conj(y), z]] with Re x = Re z = 0.
/// The real parts of x and z are zeroed on construction.
struct Sp2Algebra {
    Quaternion x, y, z;

    constexpr Sp2Algebra() = default;
    constexpr Sp2Algebra(const Quaternion& x_, const Quaternion& y_, const Quaternion& z_)
        : x(0.0, x_.x, x_.y, x_.z), y(y_), z(0.0, z_.x, z_.y, z_.z) {}

    constexpr Mat2H matrix() const { return {x, y, -conj(y), z}; }

    constexpr Sp2Algebra operator+(const Sp2Algebra& o) const {
        return {x + o.x, y + o.y, z + o.z};
    }
    constexpr Sp2Algebra operator-(const Sp2Algebra& o) const {
        return {x - o.x, y - o.y, z - o.z};
    }
    constexpr Sp2Algebra operator-() const { return {-x, -y, -z}; }
    constexpr Sp2Algebra operator*(double s) const { return {x * s, y * s, z * s}; }
};

constexpr Sp2Algebra operator*(double s, const Sp2Algebra& v) { return v * s; }

/// Orthogonal projection of an arbitrary 2x2 quaternionic matrix onto sp(2).
inline Sp2Algebra skew_project(const Mat2H& m) {
    const Quaternion x = (m.a - conj(m.a)) * 0.5;
    const Quaternion y = (m.b - conj(m.c)) * 0.5;
    const Quaternion z = (m.d - conj(m.d)) * 0.5;
    return {x, y, z};
}

/// Lie bracket [u, v] = uv - vu, computed componentwise (sp(2) is closed under it).
inline Sp2Algebra bracket(const Sp2Algebra& u, const Sp2Algebra& v) {
    const Quaternion bx = u.x * v.x - v.x * u.x - u.y * conj(v.y) + v.y * conj(u.y);
    const Quaternion by = u.x * v.y - v.x * u.y + u.y * v.z - v.y * u.z;
    const Quaternion bz = u.z * v.z - v.z * u.z - conj(u.y) * v.y + conj(v.y) * u.y;
    return {bx, by, bz};
}

/// Diagonal left-invariant metric on sp(2): |xi|^2 = wx|x|^2 + wy|y|^2 + wz|z|^2.
struct MetricWeights {
    double wx = 1.0;
    double wy = 1.0;
    double wz = 1.0;

    constexpr bool uniform() const { return wx == wy && wy == wz; }
};

inline void require_valid(const MetricWeights& w) {
    if (!(w.wx > 0.0 && w.wy > 0.0 && w.wz > 0.0))
        throw std::domain_error("metric weights must be positive");
}

inline double inner(const Sp2Algebra& u, const Sp2Algebra& v, const MetricWeights& w = {}) {
    return w.wx * dot(u.x, v.x) + w.wy * dot(u.y, v.y) + w.wz * dot(u.z, v.z);
}

inline double norm(const Sp2Algebra& u, const MetricWeights& w = {}) {
    return std::sqrt(inner(u, u, w));
}

/// Tangent vector at base, stored left-trivialized: the vector is base.matrix() * xi.matrix().
struct Sp2Tangent {
    Sp2Element base;
    Sp2Algebra xi;
};

/// Metric pairing of two tangent vectors at the same base point.
/// Throws std::domain_error when the base points differ by more than 1e-8.
inline double inner(const Sp2Tangent& u, const Sp2Tangent& v, const MetricWeights& w = {}) {
    if (frobenius_dist(u.base, v.base) > 1e-8)
        throw std::domain_error("inner: tangent vectors based at different points");
    return inner(u.xi, v.xi, w);
}

inline double norm(const Sp2Tangent& u, const MetricWeights& w = {}) {
    return std::sqrt(inner(u.xi, u.xi, w));
}

/// Orthonormal basis of sp(2) for the given weights: the x slot runs over
/// {i, j, k}/sqrt(wx), the y slot over {1, i, j, k}/sqrt(wy), the z slot over
/// {i, j, k}/sqrt(wz).
inline std::array<Sp2Algebra, 10> orthonormal_basis(const MetricWeights& w = {}) {
    require_valid(w);
    const double sx = 1.0 / std::sqrt(w.wx);
    const double sy = 1.0 / std::sqrt(w.wy);
    const double sz = 1.0 / std::sqrt(w.wz);
    const Quaternion zero = Quaternion::zero();
    return {Sp2Algebra{Quaternion::i() * sx, zero, zero},
            Sp2Algebra{Quaternion::j() * sx, zero, zero},
            Sp2Algebra{Quaternion::k() * sx, zero, zero},
            Sp2Algebra{zero, Quaternion::one() * sy, zero},
            Sp2Algebra{zero, Quaternion::i() * sy, zero},
            Sp2Algebra{zero, Quaternion::j() * sy, zero},
            Sp2Algebra{zero, Quaternion::k() * sy, zero},
            Sp2Algebra{zero, zero, Quaternion::i() * sz},
            Sp2Algebra{zero, zero, Quaternion::j() * sz},
            Sp2Algebra{zero, zero, Quaternion::k() * sz}};
}

/// Draws elements distributed by Haar measure: independent standard normal
/// components followed by row Gram-Schmidt. Deterministic for a fixed seed.
class HaarSampler {
  public:
    explicit HaarSampler(std::uint64_t seed) : engine_(seed) {}

    Sp2Element next() {
        Mat2H m;
        for (Quaternion* e : {&m.a, &m.b, &m.c, &m.d}) {
            e->w = gauss_(engine_);
            e->x = gauss_(engine_);
            e->y = gauss_(engine_);
            e->z = gauss_(engine_);
        }
        return Sp2Element(m);
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_;
};

/// Single Haar draw; fixed seed gives an identical element across runs.
inline Sp2Element haar_sample(std::uint64_t seed) { return HaarSampler(seed).next(); }

}  // namespace sp2iso
