#pragma once

#include <cmath>
#include <stdexcept>

namespace sp2iso {

/// Quaternion over double, Hamilton convention: i*j = k, j*k = i, k*i = j.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion zero() { return {0.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    constexpr Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    constexpr Quaternion operator/(double s) const { return {w / s, x / s, y / s, z / s}; }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }
};

/// Hamilton product p*q.
constexpr Quaternion mul(const Quaternion& p, const Quaternion& q) {
    return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}

constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) { return mul(p, q); }
constexpr Quaternion operator*(double s, const Quaternion& q) { return q * s; }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

constexpr double re(const Quaternion& q) { return q.w; }

/// Imaginary part as a pure quaternion.
constexpr Quaternion im(const Quaternion& q) { return {0.0, q.x, q.y, q.z}; }

constexpr double norm2(const Quaternion& q) { return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z; }

inline double norm(const Quaternion& q) { return std::sqrt(norm2(q)); }

/// Euclidean pairing of components; equals re(p * conj(q)).
constexpr double dot(const Quaternion& p, const Quaternion& q) {
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
}

inline Quaternion normalized(const Quaternion& q) {
    const double n = norm(q);
    if (n < 1e-300) throw std::domain_error("normalized: zero quaternion");
    return q / n;
}

/// Conjugation action v -> q v conj(q) of a unit quaternion on a pure quaternion.
/// The result is pure up to roundoff; the real part is zeroed explicitly.
/// Throws std::domain_error unless |q| = 1 within 1e-9.
inline Quaternion rotate(const Quaternion& q, const Quaternion& v) {
    if (std::abs(norm(q) - 1.0) > 1e-9) throw std::domain_error("rotate: quaternion must be unit norm");
    Quaternion r = q * v * conj(q);
    r.w = 0.0;
    return r;
}

/// exp of a pure quaternion: cos|v| + sin|v| * v/|v|. The real part of v is ignored.
inline Quaternion exp_pure(const Quaternion& v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n < 1e-300) return Quaternion::one();
    const double s = std::sin(n) / n;
    return {std::cos(n), s * v.x, s * v.y, s * v.z};
}

}  // namespace sp2iso
