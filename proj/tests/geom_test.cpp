#include <doctest.h>

#include <random>

#include "kinlearn/geom.hpp"
#include "support.hpp"

using namespace kinlearn;
using kinlearn::testing::near;
using kinlearn::testing::random_pose;
using kinlearn::testing::random_unit;

namespace {

Eigen::Matrix4d homogeneous(const Mat3& r, const Vec3& t) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = t;
    return m;
}

Mat3 rot_z(double deg) {
    const double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
    Mat3 r;
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return r;
}

}  // namespace

TEST_CASE("compose: identity and inverse") {
    std::mt19937_64 rng(1);
    const Posed p = random_pose(rng);
    CHECK(near(compose(Posed::Identity(), p), p, 1e-12));
    CHECK(near(compose(p, Posed::Identity()), p, 1e-12));
    CHECK(near(compose(p, inverse(p)), Posed::Identity(), 1e-12));
}

TEST_CASE("compose: hand-built 4x4 product") {
    const Posed a(rot_z(90), Vec3(1, 0, 0));
    const Posed b(Mat3::Identity(), Vec3(1, 0, 0));
    const Eigen::Matrix4d expected = homogeneous(rot_z(90), Vec3(1, 0, 0)) * homogeneous(Mat3::Identity(), Vec3(1, 0, 0));
    const Posed ab = compose(a, b);
    CHECK((ab.matrix() - expected).norm() < 1e-12);
    CHECK((ab.translation() - Vec3(1, 1, 0)).norm() < 1e-12);
    CHECK(rad2deg(rotation_angle(ab)) == doctest::Approx(90.0));
}

TEST_CASE("relative") {
    std::mt19937_64 rng(2);
    const Posed p = random_pose(rng);
    CHECK(near(relative(p, p), Posed::Identity(), 1e-12));
    CHECK(near(relative(p, Posed::Identity()), p, 1e-12));

    const Posed b(rot_z(90), Vec3::Zero());
    const Posed a(rot_z(90), Vec3(0, 1, 0));
    // Oracle: B^-1 A with 4x4 matrices.
    const Eigen::Matrix4d m = b.matrix().inverse() * a.matrix();
    const Posed r = relative(a, b);
    CHECK((r.matrix() - m).norm() < 1e-12);
    CHECK((r.translation() - Vec3(1, 0, 0)).norm() < 1e-12);
    CHECK(rotation_angle(r) < 1e-12);
}

TEST_CASE("canonical quaternion sign") {
    const Quat q(-0.5, 0.5, 0.5, 0.5);
    const Posed p(q, Vec3::Zero());
    CHECK(p.rotation().w() >= 0.0);
    CHECK(p.rotation().coeffs().isApprox(-q.coeffs()));
    // A rotation by more than pi about z maps to its short-way twin.
    const Posed big = Posed::Rotation(Vec3::UnitZ(), deg2rad(270));
    CHECK(rad2deg(rotation_angle(big)) == doctest::Approx(90.0));
}

TEST_CASE("random pose properties") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 2000; ++k) {
        const Posed a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
        CHECK(near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9));
        CHECK(near(compose(b, relative(a, b)), a, 1e-9));
        CHECK(near(relative(a, b), inverse(relative(b, a)), 1e-9));
        CHECK(std::abs(compose(a, b).rotation().norm() - 1.0) < 1e-9);
        CHECK(std::abs(inverse(a).rotation().norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("exp/log round trips") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const Vec3 w = random_unit(rng) * (1e-3 + u(rng) * (kPi - 0.011));
        const Vec3 v = 2.0 * Vec3(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
        const Twistd xi(w, v);
        const Twistd back = log(exp(xi));
        CHECK((back.vector() - xi.vector()).norm() < 1e-9);

        const Posed p = random_pose(rng, kPi - 1e-6);
        CHECK(near(exp(log(p)), p, 1e-9));
    }
    // Tiny angles use the series branches.
    const Twistd small(Vec3(1e-9, -2e-9, 0), Vec3(0.1, 0.2, 0.3));
    CHECK((log(exp(small)).vector() - small.vector()).norm() < 1e-12);
    CHECK(log(Posed::Identity()).vector().norm() == 0.0);
}

TEST_CASE("exp matches the matrix exponential of the twist") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const Twistd xi(random_unit(rng) * 1.3, Vec3(0.3, -0.2, 0.5));
        Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
        X.topLeftCorner<3, 3>() = skew(xi.rotation);
        X.topRightCorner<3, 1>() = xi.translation;
        // Taylor series of the 4x4 exponential as an independent oracle.
        Eigen::Matrix4d term = Eigen::Matrix4d::Identity(), sum = Eigen::Matrix4d::Identity();
        for (int n = 1; n < 40; ++n) {
            term = term * X / n;
            sum += term;
        }
        CHECK((exp(xi).matrix() - sum).norm() < 1e-10);
    }
}

TEST_CASE("align_point_sets: exact cases") {
    std::vector<Vec3> src{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.3, 0.7, -0.2}};
    CHECK(near(align_point_sets(src, src), Posed::Identity(), 1e-12));

    const Posed truth(rot_z(30), Vec3(0.1, 0, 0));
    std::vector<Vec3> dst;
    for (const auto& p : src) dst.push_back(truth * p);
    CHECK(near(align_point_sets(src, dst), truth, 1e-9));
}

TEST_CASE("align_point_sets: weights select the trusted points") {
    std::mt19937_64 rng(6);
    const Posed truth = random_pose(rng);
    std::vector<Vec3> src, dst;
    std::vector<double> w;
    for (int i = 0; i < 8; ++i) {
        src.push_back(random_pose(rng).translation());
        dst.push_back(truth * src.back());
        w.push_back(1.0);
    }
    src.push_back(Vec3(0, 0, 0));
    dst.push_back(Vec3(5, 5, 5));
    w.push_back(0.0);
    CHECK(near(align_point_sets(src, dst, w), truth, 1e-9));
}

TEST_CASE("align_point_sets: noisy recovery") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 0.001);
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        const Posed truth = random_pose(rng);
        std::vector<Vec3> src, dst;
        for (int i = 0; i < 10; ++i) {
            src.emplace_back(c(rng), c(rng), c(rng));
            dst.push_back(truth * src.back() + Vec3(g(rng), g(rng), g(rng)));
        }
        const auto [dt, da] = pose_distance(align_point_sets(src, dst), truth);
        CHECK(dt < 0.005);
        CHECK(rad2deg(da) < 1.0);
    }
}

TEST_CASE("align_point_sets: never returns a reflection") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> c(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec3> src, dst;
        for (int i = 0; i < 6; ++i) {
            src.emplace_back(c(rng), c(rng), c(rng));
            dst.emplace_back(-src.back().x(), src.back().y(), src.back().z());  // mirror image
        }
        const Posed p = align_point_sets(src, dst);
        CHECK(p.rotation_matrix().determinant() == doctest::Approx(1.0));
    }
}

TEST_CASE("align_point_sets: left invariance of the residual") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 0.01);
    for (int trial = 0; trial < 200; ++trial) {
        const Posed truth = random_pose(rng), g_pose = random_pose(rng);
        std::vector<Vec3> src, dst, src2, dst2;
        for (int i = 0; i < 7; ++i) {
            src.push_back(random_pose(rng).translation());
            dst.push_back(truth * src.back() + Vec3(g(rng), g(rng), g(rng)));
            src2.push_back(g_pose * src.back());
            dst2.push_back(g_pose * dst.back());
        }
        const auto residual = [](const Posed& t, const auto& s, const auto& d) {
            double r = 0;
            for (std::size_t i = 0; i < s.size(); ++i) r += (d[i] - t * s[i]).squaredNorm();
            return r;
        };
        CHECK(residual(align_point_sets(src, dst), src, dst) ==
              doctest::Approx(residual(align_point_sets(src2, dst2), src2, dst2)).epsilon(1e-9));
    }
}

TEST_CASE("align_point_sets: degenerate input") {
    const std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(align_point_sets(two, two), DegenerateGeometry);
    const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    CHECK_THROWS_AS(align_point_sets(line, line), DegenerateGeometry);
    const std::vector<Vec3> a{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    const std::vector<Vec3> b{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(align_point_sets(a, b), DegenerateGeometry);
}

TEST_CASE("mean_rotation") {
    std::mt19937_64 rng(10);
    const Quat r = random_pose(rng).rotation();
    CHECK(std::abs(mean_rotation(std::vector<Quat>{r}).angularDistance(r)) < 1e-12);
    CHECK(std::abs(mean_rotation(std::vector<Quat>{r, r}).angularDistance(r)) < 1e-12);
    CHECK(mean_rotation(std::vector<Quat>{r}).w() >= 0.0);

    const Quat plus(Eigen::AngleAxisd(deg2rad(10), Vec3::UnitZ()));
    const Quat minus(Eigen::AngleAxisd(deg2rad(-10), Vec3::UnitZ()));
    const Quat m = mean_rotation(std::vector<Quat>{plus, minus});
    CHECK(rotation_angle(m) < 1e-9);

    // Grid search over rotations about z for the chordal-cost minimum.
    const auto cost = [&](const Quat& q) {
        return (q.toRotationMatrix() - plus.toRotationMatrix()).squaredNorm() +
               (q.toRotationMatrix() - minus.toRotationMatrix()).squaredNorm();
    };
    double best = 1e9, best_deg = 0;
    for (int k = -200; k <= 200; ++k) {
        const double deg = 0.1 * k;
        const double c = cost(Quat(Eigen::AngleAxisd(deg2rad(deg), Vec3::UnitZ())));
        if (c < best) best = c, best_deg = deg;
    }
    CHECK(best_deg == doctest::Approx(0.0));
    CHECK(cost(m) <= best + 1e-12);

    CHECK_THROWS_AS(mean_rotation(std::vector<Quat>{}), EmptyInput);
}

TEST_CASE("rotation_about_line keeps the line fixed") {
    const Vec3 point(1, 2, 3), axis = Vec3(1, 1, 0).normalized();
    const Posed p = rotation_about_line(point, axis, 0.7);
    CHECK((p * point - point).norm() < 1e-12);
    CHECK((p * (point + 2.0 * axis) - (point + 2.0 * axis)).norm() < 1e-12);
    CHECK(rotation_angle(p) == doctest::Approx(0.7));
}

TEST_CASE("exp/log keep full precision at small angles") {
    // Around 1e-4 rad the textbook closed forms lose about eight digits.
    std::mt19937_64 rng(11);
    for (double angle : {1e-7, 1e-5, 1e-4, 3e-4, 1e-3, 9.9e-3, 1.01e-2, 0.05}) {
        const Twistd xi(random_unit(rng) * angle, Vec3(0.7, -0.4, 0.9));
        CHECK((log(exp(xi)).vector() - xi.vector()).norm() < 1e-14);
        // Taylor oracle for the translation part.
        Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
        X.topLeftCorner<3, 3>() = skew(xi.rotation);
        X.topRightCorner<3, 1>() = xi.translation;
        Eigen::Matrix4d term = Eigen::Matrix4d::Identity(), sum = Eigen::Matrix4d::Identity();
        for (int n = 1; n < 20; ++n) {
            term = term * X / n;
            sum += term;
        }
        CHECK((exp(xi).translation() - sum.topRightCorner<3, 1>()).norm() < 1e-15);
    }
}
