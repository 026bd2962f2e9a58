#pragma once

#include <random>

#include "kinlearn/geom.hpp"

namespace kinlearn::testing {

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v;
    do v = Vec3(g(rng), g(rng), g(rng));
    while (v.norm() < 1e-6);
    return v.normalized();
}

/// Rotation angle uniform in [0, max_angle), translation in a cube of half-width max_t.
inline Posed random_pose(std::mt19937_64& rng, double max_angle = kPi, double max_t = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0), c(-1.0, 1.0);
    const Vec3 axis = random_unit(rng);
    const Vec3 t(c(rng), c(rng), c(rng));
    return Posed(Quat(Eigen::AngleAxisd(u(rng) * max_angle, axis)), max_t * t);
}

inline bool near(const Posed& a, const Posed& b, double tol) {
    const auto [dt, da] = pose_distance(a, b);
    return dt <= tol && da <= tol;
}

}  // namespace kinlearn::testing
