#include <doctest.h>

#include <limits>
#include <random>

#include "kinlearn/joints.hpp"
#include "support.hpp"

using namespace kinlearn;
using kinlearn::testing::near;
using kinlearn::testing::random_pose;

namespace {

RelativePoseSequence sequence(const std::vector<Posed>& deltas, int first_frame = 0) {
    RelativePoseSequence s;
    for (std::size_t k = 0; k < deltas.size(); ++k) s.frames.push_back(first_frame + static_cast<int>(k));
    s.deltas = deltas;
    return s;
}

// Part origin on a circle of radius r about the z axis through the origin,
// turning with the angle.
std::vector<Posed> circle(double r, double from_deg, double to_deg, int n, const Posed& attach = Posed::Identity()) {
    std::vector<Posed> out;
    for (int k = 0; k < n; ++k) {
        const double q = deg2rad(from_deg + (to_deg - from_deg) * k / std::max(1, n - 1));
        out.push_back(rotation_about_line(Vec3(Vec3::Zero()), Vec3(Vec3::UnitZ()), q) * Posed::Translation(Vec3(r, 0, 0)) * attach);
    }
    return out;
}

std::vector<Posed> jitter(std::vector<Posed> deltas, std::mt19937_64& rng, double sigma_pos, double sigma_rot) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& d : deltas)
        d = exp(Twistd(sigma_rot * Vec3(g(rng), g(rng), g(rng)), sigma_pos * Vec3(g(rng), g(rng), g(rng)))) * d;
    return deltas;
}

// Distance from p to the line through c along unit a.
double line_distance(const Vec3& p, const Vec3& c, const Vec3& a) {
    const Vec3 v = p - c;
    return (v - v.dot(a) * a).norm();
}

ClusterAssignment truth_assignment(const Demonstration& d) {
    ClusterAssignment a;
    a.clusters.resize(d.ground_truth->part_count());
    for (const auto& [id, part] : d.ground_truth->labels) {
        a.labels[id] = part;
        a.clusters[part].push_back(id);
    }
    return a;
}

struct DemoPair {
    Demonstration demo;
    std::vector<ClusterPoseSequence> poses;
    RelativePoseSequence seq;  // child relative to parent
};

DemoPair demo_pair(const std::string& name, std::uint64_t seed, int frames = 300) {
    DemoPair p;
    p.demo = generate(default_specs().at(name), frames, seed);
    p.poses = estimate_cluster_poses(p.demo, truth_assignment(p.demo));
    REQUIRE(p.poses.size() == 2);
    p.seq = relative_sequence(p.poses[1], p.poses[0]);
    return p;
}

// Ground-truth joint axis and a point on it, both in the anchored body frame
// of the parent cluster.
std::pair<Vec3, Vec3> truth_axis(const DemoPair& p) {
    const auto& gt = *p.demo.ground_truth;
    const JointSpec& joint = gt.joints[0].spec;
    const ClusterPoseSequence& parent = p.poses[0];
    // At its reference frame the anchored parent pose is a pure translation.
    const Posed rest_to_body = Posed::Translation(-parent.anchor) * gt.part_poses[0][parent.reference_frame];
    return {rest_to_body.rotation() * joint.axis, rest_to_body * joint.origin};
}

}  // namespace

TEST_CASE("fit_rigid examples") {
    std::mt19937_64 rng(1);
    const Posed d = random_pose(rng);
    const auto m = fit_rigid(sequence({d, d, d, d}));
    CHECK(near(m.base, d, 1e-12));
    CHECK(m.configurations.empty());
    CHECK(m.parameter_count() == 6);
    CHECK(model_fit_error(m, sequence({d, d, d, d})).position < 1e-12);

    const auto two = fit_rigid(sequence({Posed::Identity(), Posed::Translation(Vec3(0.02, 0, 0))}));
    CHECK((two.base.translation() - Vec3(0.01, 0, 0)).norm() < 1e-15);
    CHECK(rotation_angle(two.base) == 0.0);

    CHECK_THROWS_AS(fit_rigid(RelativePoseSequence{}), EmptyInput);
}

TEST_CASE("fit_rigid on a noisy rigid demo") {
    // Freeze the joint: the panel then moves with the frame.
    ObjectSpec s = default_specs().at("door");
    s.joints[0].profile = MotionProfile{ProfileKind::Ramp, 0.0, 0.0};
    const Demonstration demo = generate(s, 300, 5);
    const auto poses = estimate_cluster_poses(demo, truth_assignment(demo));
    REQUIRE(poses.size() == 2);
    const auto seq = relative_sequence(poses[1], poses[0]);
    const auto m = fit_rigid(seq);
    const FitError e = model_fit_error(m, seq);
    CHECK(e.position <= 0.015);
    // Revolute nests rigid: q stays near zero instead of chasing noise.
    const auto rev = fit_revolute(seq);
    CHECK(rev.degenerate);
    CHECK(rev.q_max - rev.q_min < deg2rad(5.0));
    CHECK(rev.bic > m.bic);
}

TEST_CASE("fit_prismatic: exact line and equivariance") {
    const Posed attach(Quat(Eigen::AngleAxisd(0.4, Vec3(0, 1, 1).normalized())), Vec3(0.1, 0.2, 0.3));
    std::vector<Posed> deltas;
    for (int k = 0; k <= 40; ++k) deltas.push_back(Posed::Translation(Vec3(0.01 * k, 0, 0)) * attach);
    const auto m = fit_prismatic(sequence(deltas));
    CHECK(std::abs(std::abs(m.axis.dot(Vec3::UnitX())) - 1.0) < 1e-9);
    CHECK(m.q_max - m.q_min == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(m.configurations.front() == 0.0);
    CHECK(m.parameter_count() == 8);
    CHECK(model_fit_error(m, sequence(deltas)).position < 1e-9);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Posed g = random_pose(rng);
        std::vector<Posed> moved;
        for (const auto& d : deltas) moved.push_back(g * d);
        const auto mg = fit_prismatic(sequence(moved));
        CHECK((mg.axis - g.rotation() * m.axis).norm() < 1e-9);
        for (std::size_t k = 0; k < deltas.size(); ++k)
            CHECK(std::abs(mg.configurations[k] - m.configurations[k]) < 1e-9);
        CHECK(near(mg.base, g * m.base, 1e-9));
    }
}

TEST_CASE("fit_prismatic on the drawer demo") {
    const DemoPair p = demo_pair("drawer", 42);
    const auto m = fit_prismatic(p.seq);
    const Vec3 truth = truth_axis(p).first;
    CHECK(rad2deg(std::acos(std::min(1.0, std::abs(m.axis.dot(truth))))) < 2.0);
    CHECK(m.q_max - m.q_min == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("fit_revolute: exact circle") {
    const auto deltas = circle(0.5, 0, 90, 50);
    const auto m = fit_revolute(sequence(deltas));
    CHECK(std::abs(std::abs(m.axis.z()) - 1.0) < 1e-9);
    CHECK(line_distance(Vec3::Zero(), m.center, m.axis) < 1e-6);
    CHECK(m.radius == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m.configurations.front() == 0.0);
    CHECK(std::abs(std::abs(m.configurations.back()) - kPi / 2) < 1e-9);
    CHECK_FALSE(m.degenerate);
    CHECK(m.parameter_count() == 9);
    for (std::size_t k = 0; k < deltas.size(); ++k) CHECK(near(m.predict(m.configurations[k]), deltas[k], 1e-9));
}

TEST_CASE("fit_revolute: three points give the circumscribed circle") {
    // Three points in the plane z = 0.1 about a vertical axis through c.
    const Vec3 c(0.3, -0.2, 0.0);
    std::vector<Posed> deltas;
    for (double deg : {0.0, 25.0, 70.0})
        deltas.push_back(rotation_about_line(c, Vec3(Vec3::UnitZ()), deg2rad(deg)) *
                         Posed::Translation(c + Vec3(0.4, 0.0, 0.1)));
    // Circumscribed circle from perpendicular bisectors, independent of the fitter.
    const Eigen::Vector2d a = deltas[0].translation().head<2>(), b = deltas[1].translation().head<2>(),
                          e = deltas[2].translation().head<2>();
    const double dd = 2 * (a.x() * (b.y() - e.y()) + b.x() * (e.y() - a.y()) + e.x() * (a.y() - b.y()));
    const Eigen::Vector2d centre((a.squaredNorm() * (b.y() - e.y()) + b.squaredNorm() * (e.y() - a.y()) +
                                  e.squaredNorm() * (a.y() - b.y())) / dd,
                                 (a.squaredNorm() * (e.x() - b.x()) + b.squaredNorm() * (a.x() - e.x()) +
                                  e.squaredNorm() * (b.x() - a.x())) / dd);
    const double radius = (a - centre).norm();

    const auto m = fit_revolute(sequence(deltas));
    CHECK(line_distance(Vec3(centre.x(), centre.y(), 0), m.center, m.axis) < 1e-9);
    CHECK(m.radius == doctest::Approx(radius).epsilon(1e-9));
}

TEST_CASE("fit_revolute on the door demo") {
    const DemoPair p = demo_pair("door", 42);
    const auto m = fit_revolute(p.seq);
    const auto [axis, point] = truth_axis(p);
    CHECK(rad2deg(std::acos(std::min(1.0, std::abs(m.axis.dot(axis))))) < 2.0);
    CHECK(line_distance(point, m.center, m.axis) < 0.02);
}

TEST_CASE("fit_revolute: degenerate motion is flagged") {
    CHECK(fit_revolute(sequence(circle(0.5, 0, 3, 20))).degenerate);
    // Part origin on the axis: no circle, angle from the rotations.
    const auto m = fit_revolute(sequence(circle(0.0, 0, 60, 20)));
    CHECK(m.degenerate);
    CHECK(std::abs(std::abs(m.configurations.back()) - deg2rad(60)) < 1e-9);
    CHECK(model_fit_error(m, sequence(circle(0.0, 0, 60, 20))).angle < 1e-6);
    CHECK_THROWS_AS(fit_revolute(sequence(circle(0.5, 0, 90, 2))), EmptyInput);
}

TEST_CASE("fit_revolute equivariance") {
    std::mt19937_64 rng(3);
    const Posed attach(Quat(Eigen::AngleAxisd(0.3, Vec3::UnitX())), Vec3(0, 0.1, 0.05));
    const auto seq = sequence(jitter(circle(0.4, -20, 80, 60, attach), rng, 0.003, 0.01));
    const auto m = fit_revolute(seq);
    for (int trial = 0; trial < 10; ++trial) {
        const Posed g = random_pose(rng);
        RelativePoseSequence moved = seq;
        for (auto& d : moved.deltas) d = g * d;
        const auto mg = fit_revolute(moved);
        CHECK((mg.axis - g.rotation() * m.axis).norm() < 1e-6);
        CHECK(line_distance(g * m.center, mg.center, mg.axis) < 1e-6);
        CHECK(mg.loglik == doctest::Approx(m.loglik).epsilon(1e-9));
        CHECK(mg.radius == doctest::Approx(m.radius).epsilon(1e-9));
    }
}

TEST_CASE("loglik closed form and monotonicity") {
    const NoiseModel noise;
    const auto deltas = circle(0.5, 0, 90, 30);
    const auto m = fit_revolute(sequence(deltas));
    const double zero = 30 * (log_normal(0, noise.sigma_pos) + log_normal(0, noise.sigma_rot));
    CHECK(m.loglik == doctest::Approx(zero).epsilon(1e-9));
    CHECK(log_normal(0.0, 1.0) == doctest::Approx(-0.5 * std::log(2 * kPi)));

    auto perturbed = deltas;
    perturbed[10] = Posed::Translation(Vec3(0.01, 0, 0)) * deltas[10];
    const double one = loglik(m, sequence(perturbed), noise);
    perturbed[10] = Posed::Translation(Vec3(0.02, 0, 0)) * deltas[10];
    const double two = loglik(m, sequence(perturbed), noise);
    CHECK(one < m.loglik);
    CHECK(two < one);
    CHECK_THROWS_AS(loglik(m, sequence(deltas), NoiseModel{0.0, 0.1}), InvalidSpec);
}

TEST_CASE("revolute beats rigid on rotating data by a wide margin") {
    std::mt19937_64 rng(4);
    const auto seq = sequence(jitter(circle(0.5, 0, 90, 300), rng, 0.005, deg2rad(2)));
    const double rigid = fit_rigid(seq).loglik, revolute = fit_revolute(seq).loglik;
    CHECK(revolute - rigid > 100.0);
}

TEST_CASE("bic matches its definition") {
    std::mt19937_64 rng(5);
    for (int n : {30, 100, 300}) {
        const auto seq = sequence(jitter(circle(0.5, 0, 90, n), rng, 0.005, deg2rad(2)));
        for (const auto& m : select_model(seq).candidates) {
            CHECK(m.n == n);
            CHECK(m.bic == doctest::Approx(-2.0 * m.loglik + m.parameter_count() * std::log(n)));
        }
    }
    CHECK(bic(-10.0, 6, 1) == 20.0);
}

TEST_CASE("select_model examples") {
    std::mt19937_64 rng(6);
    const Posed fixed = random_pose(rng);
    const auto still = sequence(jitter(std::vector<Posed>(100, fixed), rng, 0.001, 0.002));
    CHECK(select_model(still).best.kind == JointKind::Rigid);

    const auto door = demo_pair("door", 42);
    CHECK(select_model(door.seq).best.kind == JointKind::Revolute);

    const auto drawer = demo_pair("drawer", 42);
    const auto sel = select_model(drawer.seq);
    REQUIRE(sel.best.kind == JointKind::Prismatic);
    for (const auto& c : sel.candidates)
        if (c.kind != JointKind::Prismatic) CHECK(c.bic - sel.best.bic > 10.0);

    CHECK(sel.candidates.size() == 3);
    CHECK_THROWS_AS(select_model(sequence({fixed, fixed})), EmptyInput);
}

TEST_CASE("select_model tie-break prefers fewer parameters") {
    // Noise-free static data: every kind explains it perfectly, the
    // extra parameters only cost.
    const auto seq = sequence(std::vector<Posed>(20, Posed::Translation(Vec3(0.1, 0, 0))));
    const auto sel = select_model(seq);
    CHECK(sel.best.kind == JointKind::Rigid);
}

TEST_CASE("model_fit_error") {
    const auto deltas = circle(0.5, 0, 90, 30);
    const auto m = fit_revolute(sequence(deltas));
    const FitError e = model_fit_error(m, sequence(deltas));
    CHECK(e.position < 1e-9);
    CHECK(e.angle < 1e-6);

    const auto rigid = fit_rigid(sequence({Posed::Identity(), Posed::Translation(Vec3(0.02, 0, 0))}));
    const Posed one = Posed::Translation(Vec3(0.05, 0, 0));
    const FitError single = model_fit_error(rigid, sequence({one}));
    CHECK(single.position == doctest::Approx(0.04));
    CHECK(single.angle == 0.0);
    CHECK(model_fit_error(rigid, RelativePoseSequence{}).position == 0.0);
}

TEST_CASE("gauge: q starts at zero and frame numbers do not matter") {
    std::mt19937_64 rng(7);
    const auto deltas = jitter(circle(0.4, 10, 70, 40), rng, 0.002, 0.005);
    for (JointKind kind : kAllJointKinds) {
        const auto a = fit(kind, sequence(deltas, 0));
        const auto b = fit(kind, sequence(deltas, 500));
        if (!a.configurations.empty()) CHECK(a.configurations.front() == 0.0);
        CHECK(a.base == b.base);
        CHECK(a.axis == b.axis);
        CHECK(a.center == b.center);
        CHECK(a.configurations == b.configurations);
        CHECK(a.loglik == b.loglik);
        CHECK(b.frames.front() == 500);
    }
}

TEST_CASE("prediction keeps the radius") {
    const auto m = fit_revolute(sequence(circle(0.5, 0, 90, 30)));
    for (double q = -3.0; q <= 3.0; q += 0.25)
        CHECK(line_distance(m.predict(q).translation(), m.center, m.axis) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bic consistency on noise-free prismatic data") {
    double previous = std::numeric_limits<double>::infinity();
    for (int n : {30, 100, 300}) {
        std::vector<Posed> deltas;
        for (int k = 0; k < n; ++k) deltas.push_back(Posed::Translation(Vec3(0.4 * k / (n - 1), 0.05, 0)));
        const auto seq = sequence(deltas);
        const double gap = fit_prismatic(seq).bic - fit_rigid(seq).bic;
        CHECK(gap < previous);
        previous = gap;
    }
    CHECK(previous < 0.0);
}

TEST_CASE("degenerate motion loses to rigid") {
    const Posed fixed(Quat(Eigen::AngleAxisd(0.2, Vec3::UnitY())), Vec3(0.1, 0.2, 0.3));
    const auto seq = sequence(std::vector<Posed>(50, fixed));
    const auto rigid = fit_rigid(seq), prismatic = fit_prismatic(seq), revolute = fit_revolute(seq);
    CHECK(prismatic.degenerate);
    CHECK(revolute.degenerate);
    CHECK(prismatic.loglik == doctest::Approx(rigid.loglik));
    CHECK(revolute.loglik == doctest::Approx(rigid.loglik));
    CHECK(prismatic.bic > rigid.bic);
    CHECK(revolute.bic > rigid.bic);
}

TEST_CASE("noise-free catalog joints are identified") {
    for (const auto& [name, base] : default_specs()) {
        CAPTURE(name);
        ObjectSpec s = base;
        s.noise_sigma_pos = 0.0;
        s.noise_sigma_normal = 0.0;
        s.dropout_prob = 0.0;
        for (std::uint64_t seed : {1, 2, 3}) {
            const Demonstration d = generate(s, 200, seed);
            const auto poses = estimate_cluster_poses(d, truth_assignment(d));
            for (const auto& gj : d.ground_truth->joints) {
                const auto seq = relative_sequence(poses[gj.spec.child], poses[gj.spec.parent]);
                CHECK(select_model(seq).best.kind == gj.spec.type);
            }
        }
    }
}
