#pragma once

// Independent reference computations for the test suite, built on Eigen's
// dense real linear algebra rather than on the quaternion code under test.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "sp2iso/quaternion.hpp"
#include "sp2iso/sp2.hpp"

namespace oracle {

inline Eigen::Vector4d to_vec(const sp2iso::Quaternion& q) {
    return Eigen::Vector4d(q.w, q.x, q.y, q.z);
}

inline sp2iso::Quaternion from_vec(const Eigen::Vector4d& v) {
    return {v(0), v(1), v(2), v(3)};
}

/// 4x4 real matrix of left multiplication p -> q p in coordinates (w,x,y,z).
inline Eigen::Matrix4d left_mat(const sp2iso::Quaternion& q) {
    Eigen::Matrix4d m;
    m << q.w, -q.x, -q.y, -q.z,
         q.x,  q.w, -q.z,  q.y,
         q.y,  q.z,  q.w, -q.x,
         q.z, -q.y,  q.x,  q.w;
    return m;
}

/// 3x3 rotation matrix of v -> q v conj(q) on imaginary quaternions.
inline Eigen::Matrix3d rotation_matrix(const sp2iso::Quaternion& q) {
    Eigen::Matrix3d r;
    const sp2iso::Quaternion cols[3] = {sp2iso::Quaternion::i(), sp2iso::Quaternion::j(),
                                        sp2iso::Quaternion::k()};
    for (int j = 0; j < 3; ++j) {
        const sp2iso::Quaternion c = q * cols[j] * conj(q);
        r(0, j) = c.x;
        r(1, j) = c.y;
        r(2, j) = c.z;
    }
    return r;
}

using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Real 8x8 image of a quaternionic 2x2 matrix acting by left multiplication
/// on column vectors of H^2 = R^8. Multiplicative, so it turns matrix
/// products and exponentials into their dense real counterparts.
inline Mat8 real_rep(const sp2iso::Mat2H& m) {
    Mat8 r = Mat8::Zero();
    r.block<4, 4>(0, 0) = left_mat(m.a);
    r.block<4, 4>(0, 4) = left_mat(m.b);
    r.block<4, 4>(4, 0) = left_mat(m.c);
    r.block<4, 4>(4, 4) = left_mat(m.d);
    return r;
}

/// Recovers the quaternionic entries from a representation image: the columns
/// at the basis vectors e_0 = (1, 0) and e_4 = (0, 1) hold (a, c) and (b, d).
inline sp2iso::Mat2H rep_to_mat(const Mat8& r) {
    sp2iso::Mat2H m;
    m.a = from_vec(r.block<4, 1>(0, 0));
    m.c = from_vec(r.block<4, 1>(4, 0));
    m.b = from_vec(r.block<4, 1>(0, 4));
    m.d = from_vec(r.block<4, 1>(4, 4));
    return m;
}

/// Dense-real matrix exponential of a quaternionic matrix.
inline sp2iso::Mat2H expm_oracle(const sp2iso::Mat2H& m) {
    return rep_to_mat(real_rep(m).exp());
}

inline double mat_dist(const sp2iso::Mat2H& p, const sp2iso::Mat2H& q) {
    return sp2iso::frobenius_dist(p, q);
}

}  // namespace oracle
