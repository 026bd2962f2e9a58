#pragma once

// SE(3) kernel: poses as (unit quaternion, translation), tangent-space exp/log,
// rotation averaging and weighted point-set alignment. Everything is a free
// function templated on the scalar so it composes with Eigen expressions.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "kinlearn/errors.hpp"

namespace kinlearn {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vector3<double>;
using Vec6 = Vector6<double>;
using Mat3 = Matrix3<double>;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Unit quaternion with the double cover removed: scalar part >= 0.
/// Already-unit inputs are left bit-for-bit unchanged so stored poses round-trip.
template <typename Scalar>
Eigen::Quaternion<Scalar> canonical(Eigen::Quaternion<Scalar> q) {
    using std::abs;
    using std::sqrt;
    const Scalar n2 = q.squaredNorm();
    if (abs(n2 - Scalar(1)) > Scalar(8) * Eigen::NumTraits<Scalar>::epsilon()) q.coeffs() /= sqrt(n2);
    if (q.w() < Scalar(0)) q.coeffs() = -q.coeffs();
    return q;
}

/// Rigid motion x -> R x + t. Rotation is stored as a canonical unit quaternion.
template <typename Scalar>
class Pose {
public:
    using Quaternion = Eigen::Quaternion<Scalar>;
    using Vector = Vector3<Scalar>;

    Pose() : rotation_(Quaternion::Identity()), translation_(Vector::Zero()) {}
    Pose(const Quaternion& rotation, const Vector& translation)
        : rotation_(canonical(rotation)), translation_(translation) {}
    Pose(const Matrix3<Scalar>& rotation, const Vector& translation)
        : Pose(Quaternion(rotation), translation) {}

    static Pose Identity() { return Pose(); }
    static Pose Translation(const Vector& t) { return Pose(Quaternion::Identity(), t); }
    static Pose Rotation(const Vector& axis, Scalar angle) {
        return Pose(Quaternion(Eigen::AngleAxis<Scalar>(angle, axis.normalized())), Vector::Zero());
    }

    const Quaternion& rotation() const { return rotation_; }
    const Vector& translation() const { return translation_; }
    Matrix3<Scalar> rotation_matrix() const { return rotation_.toRotationMatrix(); }

    Eigen::Matrix<Scalar, 4, 4> matrix() const {
        Eigen::Matrix<Scalar, 4, 4> m = Eigen::Matrix<Scalar, 4, 4>::Identity();
        m.template topLeftCorner<3, 3>() = rotation_matrix();
        m.template topRightCorner<3, 1>() = translation_;
        return m;
    }

    template <typename Derived>
    Vector operator*(const Eigen::MatrixBase<Derived>& point) const {
        return rotation_ * point + translation_;
    }

    Pose operator*(const Pose& other) const {
        return Pose(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
    }

    template <typename Other>
    Pose<Other> cast() const {
        return Pose<Other>(rotation_.template cast<Other>(), translation_.template cast<Other>());
    }

    /// Exact coefficient equality (used for lossless round trips).
    friend bool operator==(const Pose& a, const Pose& b) {
        return a.rotation_.coeffs() == b.rotation_.coeffs() && a.translation_ == b.translation_;
    }

private:
    Quaternion rotation_;
    Vector translation_;
};

using Posed = Pose<double>;

/// Tangent vector of SE(3): rotation part (radians) then translation part (meters).
template <typename Scalar>
struct Twist {
    Vector3<Scalar> rotation = Vector3<Scalar>::Zero();
    Vector3<Scalar> translation = Vector3<Scalar>::Zero();

    Twist() = default;
    Twist(const Vector3<Scalar>& w, const Vector3<Scalar>& v) : rotation(w), translation(v) {}
    explicit Twist(const Vector6<Scalar>& xi) : rotation(xi.template head<3>()), translation(xi.template tail<3>()) {}

    Vector6<Scalar> vector() const {
        Vector6<Scalar> xi;
        xi << rotation, translation;
        return xi;
    }
};

using Twistd = Twist<double>;

template <typename Scalar>
Pose<Scalar> compose(const Pose<Scalar>& a, const Pose<Scalar>& b) {
    return a * b;
}

template <typename Scalar>
Pose<Scalar> inverse(const Pose<Scalar>& p) {
    const auto qinv = p.rotation().conjugate();
    return Pose<Scalar>(qinv, -(qinv * p.translation()));
}

/// a relative to b: inverse(b) * a, so that b * relative(a, b) == a.
template <typename Scalar>
Pose<Scalar> relative(const Pose<Scalar>& a, const Pose<Scalar>& b) {
    return inverse(b) * a;
}

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
    Matrix3<Scalar> m;
    m << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(), Scalar(0);
    return m;
}

template <typename Scalar>
Eigen::Quaternion<Scalar> so3_exp(const Vector3<Scalar>& w) {
    using std::cos;
    using std::sin;
    const Scalar theta = w.norm();
    const Scalar half = theta / Scalar(2);
    Scalar k;  // sin(theta/2) / theta
    if (theta < Scalar(1e-8))
        k = Scalar(0.5) - theta * theta / Scalar(48);
    else
        k = sin(half) / theta;
    Eigen::Quaternion<Scalar> q(cos(half), k * w.x(), k * w.y(), k * w.z());
    return canonical(q);
}

template <typename Scalar>
Vector3<Scalar> so3_log(const Eigen::Quaternion<Scalar>& rotation) {
    using std::atan2;
    const auto q = canonical(rotation);
    const Vector3<Scalar> v = q.vec();
    const Scalar s = v.norm();
    if (s < Scalar(1e-10)) return Scalar(2) * v / q.w();
    const Scalar theta = Scalar(2) * atan2(s, q.w());
    return v * (theta / s);
}

/// Geodesic rotation angle in [0, pi].
template <typename Scalar>
Scalar rotation_angle(const Eigen::Quaternion<Scalar>& rotation) {
    using std::abs;
    using std::atan2;
    return Scalar(2) * atan2(rotation.vec().norm(), abs(rotation.w()));
}

template <typename Scalar>
Scalar rotation_angle(const Pose<Scalar>& p) {
    return rotation_angle(p.rotation());
}

namespace detail {

// Coefficients of V(w) = I + b W + c W^2 for the SE(3) exponential. The
// closed forms cancel badly for small theta, so a series takes over below
// 1e-2 (truncation error under 1e-22).
template <typename Scalar>
void se3_coefficients(Scalar theta, Scalar& b, Scalar& c) {
    using std::sin;
    const Scalar t2 = theta * theta;
    if (theta < Scalar(1e-2)) {
        b = Scalar(0.5) - t2 / Scalar(24) * (Scalar(1) - t2 / Scalar(30) * (Scalar(1) - t2 / Scalar(56)));
        c = Scalar(1) / Scalar(6) - t2 / Scalar(120) * (Scalar(1) - t2 / Scalar(42) * (Scalar(1) - t2 / Scalar(72)));
    } else {
        const Scalar s = sin(theta / Scalar(2));
        b = Scalar(2) * s * s / t2;
        c = (theta - sin(theta)) / (t2 * theta);
    }
}

// k in V^-1 = I - W/2 + k W^2.
template <typename Scalar>
Scalar se3_inverse_coefficient(Scalar theta) {
    using std::cos;
    using std::sin;
    const Scalar t2 = theta * theta;
    if (theta < Scalar(1e-2))
        return Scalar(1) / Scalar(12) + t2 / Scalar(720) * (Scalar(1) + t2 / Scalar(42) * (Scalar(1) + t2 / Scalar(40)));
    const Scalar half = theta / Scalar(2);
    return (Scalar(1) - half * cos(half) / sin(half)) / t2;
}

}  // namespace detail

template <typename Scalar>
Pose<Scalar> exp(const Twist<Scalar>& xi) {
    const Scalar theta = xi.rotation.norm();
    Scalar b, c;
    detail::se3_coefficients(theta, b, c);
    const Matrix3<Scalar> W = skew(xi.rotation);
    const Matrix3<Scalar> V = Matrix3<Scalar>::Identity() + b * W + c * W * W;
    return Pose<Scalar>(so3_exp(xi.rotation), V * xi.translation);
}

template <typename Scalar>
Twist<Scalar> log(const Pose<Scalar>& p) {
    const Vector3<Scalar> w = so3_log(p.rotation());
    const Matrix3<Scalar> W = skew(w);
    const Scalar k = detail::se3_inverse_coefficient(w.norm());
    const Matrix3<Scalar> Vinv = Matrix3<Scalar>::Identity() - Scalar(0.5) * W + k * W * W;
    return Twist<Scalar>(w, Vinv * p.translation());
}

/// Rotation by `angle` about the line through `point` with direction `axis`.
template <typename Scalar>
Pose<Scalar> rotation_about_line(const Vector3<Scalar>& point, const Vector3<Scalar>& axis, Scalar angle) {
    const Eigen::Quaternion<Scalar> q(Eigen::AngleAxis<Scalar>(angle, axis.normalized()));
    return Pose<Scalar>(q, point - q * point);
}

/// Chordal L2 mean of unit quaternions: dominant eigenvector of sum(q q^T).
template <typename Scalar>
Eigen::Quaternion<Scalar> mean_rotation(std::span<const Eigen::Quaternion<Scalar>> rotations) {
    if (rotations.empty()) throw EmptyInput("mean_rotation: no rotations");
    Eigen::Matrix<Scalar, 4, 4> M = Eigen::Matrix<Scalar, 4, 4>::Zero();
    for (const auto& q : rotations) {
        const Eigen::Matrix<Scalar, 4, 1> c = q.normalized().coeffs();
        M.noalias() += c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 4, 4>> eig(M);
    const Eigen::Matrix<Scalar, 4, 1> top = eig.eigenvectors().col(3);
    Eigen::Quaternion<Scalar> q;
    q.coeffs() = top;
    return canonical(q);
}

template <typename Scalar>
Eigen::Quaternion<Scalar> mean_rotation(const std::vector<Eigen::Quaternion<Scalar>>& rotations) {
    return mean_rotation(std::span<const Eigen::Quaternion<Scalar>>(rotations));
}

/// Pose T minimizing sum w_i |dst_i - T src_i|^2 (cross-covariance SVD with
/// reflection correction). Empty `weights` means unit weights.
template <typename Scalar>
Pose<Scalar> align_point_sets(std::span<const Vector3<Scalar>> src, std::span<const Vector3<Scalar>> dst,
                              std::span<const Scalar> weights = {}) {
    if (src.size() != dst.size()) throw DegenerateGeometry("align_point_sets: size mismatch");
    if (!weights.empty() && weights.size() != src.size())
        throw DegenerateGeometry("align_point_sets: weight count mismatch");
    const auto weight = [&](std::size_t i) { return weights.empty() ? Scalar(1) : weights[i]; };

    std::size_t support = 0;
    Scalar wsum(0);
    Vector3<Scalar> cs = Vector3<Scalar>::Zero(), cd = Vector3<Scalar>::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Scalar w = weight(i);
        if (w < Scalar(0)) throw DegenerateGeometry("align_point_sets: negative weight");
        if (w > Scalar(0)) ++support;
        wsum += w;
        cs += w * src[i];
        cd += w * dst[i];
    }
    if (support < 3) throw DegenerateGeometry("align_point_sets: fewer than 3 correspondences");
    cs /= wsum;
    cd /= wsum;

    Matrix3<Scalar> H = Matrix3<Scalar>::Zero();
    Matrix3<Scalar> S = Matrix3<Scalar>::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vector3<Scalar> a = src[i] - cs;
        H.noalias() += weight(i) * a * (dst[i] - cd).transpose();
        S.noalias() += weight(i) * a * a.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix3<Scalar>> spread(S);
    const Vector3<Scalar> ev = spread.eigenvalues();  // ascending
    if (!(ev(2) > Scalar(0)) || ev(1) / ev(2) < Scalar(1e-6))
        throw DegenerateGeometry("align_point_sets: source points are collinear");

    Eigen::JacobiSVD<Matrix3<Scalar>> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix3<Scalar> U = svd.matrixU();
    const Matrix3<Scalar> V = svd.matrixV();
    Matrix3<Scalar> D = Matrix3<Scalar>::Identity();
    if ((V * U.transpose()).determinant() < Scalar(0)) D(2, 2) = Scalar(-1);
    const Matrix3<Scalar> R = V * D * U.transpose();
    return Pose<Scalar>(R, cd - R * cs);
}

template <typename Scalar>
Pose<Scalar> align_point_sets(const std::vector<Vector3<Scalar>>& src, const std::vector<Vector3<Scalar>>& dst,
                              const std::vector<Scalar>& weights = {}) {
    return align_point_sets(std::span<const Vector3<Scalar>>(src), std::span<const Vector3<Scalar>>(dst),
                            std::span<const Scalar>(weights));
}

/// Translation norm and geodesic angle (radians) of relative(a, b).
template <typename Scalar>
std::pair<Scalar, Scalar> pose_distance(const Pose<Scalar>& a, const Pose<Scalar>& b) {
    const Pose<Scalar> d = relative(a, b);
    return {d.translation().norm(), rotation_angle(d)};
}

}  // namespace kinlearn
