// Household objects used as synthetic demonstration subjects. Rest frames are
// x right, y away from the viewer, z up; feature-bearing faces sit where a
// tracker would find texture (handles, panels, frames), away from the joint
// axes.

#include "kinlearn/demo.hpp"

namespace kinlearn {

namespace {

Face rect(const Vec3& origin, const Vec3& u, const Vec3& v) { return Face{origin, u, v}; }

MotionProfile sinusoid(double from, double to, double cycles) {
    return MotionProfile{ProfileKind::Sinusoid, from, to, cycles, 0.3};
}

ObjectSpec base_spec(std::string name) {
    ObjectSpec spec;
    spec.name = std::move(name);
    // Object about 2 m in front of the viewer, yawed so no axis is world-aligned.
    const Eigen::Quaterniond yaw(Eigen::AngleAxisd(deg2rad(25.0), Vec3::UnitZ()) *
                                 Eigen::AngleAxisd(deg2rad(-8.0), Vec3::UnitX()));
    spec.placement = Posed(yaw, Vec3(0.3, 2.2, -0.6));
    spec.features_per_part = 40;
    spec.noise_sigma_pos = 0.005;
    spec.noise_sigma_normal = deg2rad(2.0);
    spec.dropout_prob = 0.02;
    spec.track_lifetime = 0.0;
    spec.frame_rate = 30.0;
    return spec;
}

ObjectSpec door() {
    ObjectSpec s = base_spec("door");
    // Wall to the left of the hinge, panel to the right; both face the viewer.
    s.parts.push_back({"frame",
                       {rect({-0.9, 0.0, 0.7}, {0.6, 0, 0}, {0, 0, 0.8}),
                        rect({-0.95, 0.05, 0.7}, {0, 0.5, 0}, {0, 0, 0.8})}});
    s.parts.push_back({"panel", {rect({0.3, 0.0, 0.7}, {0.55, 0, 0}, {0, 0, 0.8})}});
    s.joints.push_back({0, 1, JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero(), sinusoid(0.0, deg2rad(-90.0), 1.5)});
    return s;
}

ObjectSpec drawer() {
    ObjectSpec s = base_spec("drawer");
    s.parts.push_back({"cabinet",
                       {rect({-0.45, 0.0, 0.45}, {0.9, 0, 0}, {0, 0, 0.3}),
                        rect({0.5, 0.05, 0.0}, {0, 0.4, 0}, {0, 0, 0.7})}});
    s.parts.push_back({"drawer", {rect({-0.3, 0.0, 0.08}, {0.6, 0, 0}, {0, 0, 0.27})}});
    s.joints.push_back({0, 1, JointKind::Prismatic, -Vec3::UnitY(), Vec3::Zero(), sinusoid(0.0, 0.4, 1.5)});
    return s;
}

ObjectSpec fridge() {
    ObjectSpec s = base_spec("fridge");
    // Hinge on the left edge; freezer door and right side wall stay put.
    s.parts.push_back({"body",
                       {rect({0.25, 0.0, 1.6}, {0.4, 0, 0}, {0, 0, 0.25}),
                        rect({0.72, 0.05, 0.6}, {0, 0.55, 0}, {0, 0, 0.8})}});
    s.parts.push_back({"door", {rect({0.25, 0.0, 0.7}, {0.4, 0, 0}, {0, 0, 0.7})}});
    s.joints.push_back({0, 1, JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero(), sinusoid(0.0, deg2rad(-95.0), 1.5)});
    return s;
}

ObjectSpec laptop() {
    ObjectSpec s = base_spec("laptop");
    // Hinge along x at the back edge of the base; the lid starts upright and
    // closes toward the keyboard.
    s.parts.push_back({"base", {rect({-0.12, 0.0, 0.0}, {0.24, 0, 0}, {0, 0.14, 0})}});
    s.parts.push_back({"lid", {rect({-0.12, 0.25, 0.1}, {0.24, 0, 0}, {0, 0, 0.12})}});
    s.joints.push_back(
        {0, 1, JointKind::Revolute, Vec3::UnitX(), Vec3(0, 0.25, 0), sinusoid(0.0, deg2rad(80.0), 1.5)});
    return s;
}

ObjectSpec microwave() {
    ObjectSpec s = base_spec("microwave");
    s.parts.push_back({"body",
                       {rect({0.4, 0.0, 0.03}, {0.12, 0, 0}, {0, 0, 0.25}),
                        rect({0.1, 0.05, 0.32}, {0.4, 0, 0}, {0, 0.3, 0})}});
    s.parts.push_back({"door", {rect({0.14, 0.0, 0.04}, {0.2, 0, 0}, {0, 0, 0.22})}});
    s.joints.push_back({0, 1, JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero(), sinusoid(0.0, deg2rad(-95.0), 1.5)});
    return s;
}

ObjectSpec chair() {
    // Two-part stand-in: the seat swivels on a rigid base.
    ObjectSpec s = base_spec("chair");
    s.parts.push_back({"base", {rect({-0.3, -0.3, 0.0}, {0.6, 0, 0}, {0, 0, 0.12})}});
    s.parts.push_back({"seat",
                       {rect({0.12, -0.25, 0.45}, {0.13, 0, 0}, {0, 0.5, 0}),
                        rect({-0.25, 0.22, 0.6}, {0.5, 0, 0}, {0, 0, 0.3})}});
    s.joints.push_back({0, 1, JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero(), sinusoid(0.0, deg2rad(120.0), 1.0)});
    return s;
}

ObjectSpec monitor() {
    // Serial 2-DOF chain: the arm swivels on the base about z, the screen
    // tilts on the arm about x.
    ObjectSpec s = base_spec("monitor");
    // Base texture front right, arm bracket to the right behind the tilt
    // hinge, so neither pair sits opposite across an axis.
    s.parts.push_back({"base", {rect({0.2, -0.15, 0.0}, {0.2, 0, 0}, {0, 0.15, 0})}});
    s.parts.push_back({"arm", {rect({0.12, 0.06, 0.33}, {0.15, 0, 0}, {0, 0.12, 0})}});
    s.parts.push_back({"screen", {rect({-0.2, -0.06, 0.42}, {0.4, 0, 0}, {0, 0, 0.23})}});
    s.joints.push_back({0, 1, JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero(), sinusoid(0.0, deg2rad(70.0), 1.0)});
    s.joints.push_back(
        {1, 2, JointKind::Revolute, Vec3::UnitX(), Vec3(0, -0.04, 0.3), sinusoid(0.0, deg2rad(60.0), 2.0)});
    return s;
}

}  // namespace

std::map<std::string, ObjectSpec> default_specs() {
    std::map<std::string, ObjectSpec> catalog;
    for (ObjectSpec s : {door(), drawer(), fridge(), laptop(), microwave(), chair(), monitor()})
        catalog.emplace(s.name, std::move(s));
    return catalog;
}

}  // namespace kinlearn
