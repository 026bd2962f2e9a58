#include "kinlearn/demo.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

namespace kinlearn {

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Ramp: return "ramp";
        case ProfileKind::Smoothstep: return "smoothstep";
        case ProfileKind::Sinusoid: return "sinusoid";
        case ProfileKind::HoldThenMove: return "hold_then_move";
    }
    return "?";
}

std::optional<ProfileKind> parse_profile_kind(std::string_view name) {
    for (auto k : {ProfileKind::Ramp, ProfileKind::Smoothstep, ProfileKind::Sinusoid, ProfileKind::HoldThenMove})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

double MotionProfile::at(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    double u = 0.0;
    switch (kind) {
        case ProfileKind::Ramp: u = s; break;
        case ProfileKind::Smoothstep: u = s * s * (3.0 - 2.0 * s); break;
        case ProfileKind::Sinusoid: u = 0.5 * (1.0 - std::cos(2.0 * kPi * cycles * s)); break;
        case ProfileKind::HoldThenMove:
            u = (s <= hold_fraction || hold_fraction >= 1.0) ? 0.0 : (s - hold_fraction) / (1.0 - hold_fraction);
            break;
    }
    return from + (to - from) * u;
}

Posed JointSpec::transform(double q) const {
    switch (type) {
        case JointKind::Rigid: return Posed::Identity();
        case JointKind::Prismatic: return Posed::Translation(q * axis);
        case JointKind::Revolute: return rotation_about_line<double>(origin, axis, q);
    }
    return Posed::Identity();
}

int Demonstration::frame_count() const {
    int n = 0;
    for (const auto& t : trajectories)
        if (!t.observations.empty()) n = std::max(n, t.last_frame() + 1);
    return n;
}

const FeatureTrajectory* Demonstration::find(TrajectoryId id) const {
    for (const auto& t : trajectories)
        if (t.id == id) return &t;
    return nullptr;
}

void validate(const ObjectSpec& spec) {
    const int n = static_cast<int>(spec.parts.size());
    if (n == 0) throw InvalidSpec("object '" + spec.name + "' has no parts");
    if (static_cast<int>(spec.joints.size()) != n - 1)
        throw InvalidSpec("object '" + spec.name + "': joints must form a tree (" + std::to_string(n - 1) +
                          " joints expected, got " + std::to_string(spec.joints.size()) + ")");
    std::vector<int> parent_of(n, -1);
    for (const auto& j : spec.joints) {
        if (j.parent < 0 || j.parent >= n || j.child < 0 || j.child >= n || j.parent == j.child)
            throw InvalidSpec("joint references an invalid part");
        if (j.child == 0) throw InvalidSpec("part 0 is the root and cannot be a joint child");
        if (parent_of[j.child] != -1) throw InvalidSpec("part " + std::to_string(j.child) + " has two parents");
        if (std::abs(j.axis.norm() - 1.0) > 1e-6) throw InvalidSpec("joint axis is not unit length");
        parent_of[j.child] = j.parent;
    }
    // Every part must reach the root without revisiting a part.
    for (int p = 1; p < n; ++p) {
        int cur = p;
        for (int steps = 0; cur != 0; ++steps) {
            if (steps > n || cur < 0) throw InvalidSpec("joints contain a cycle");
            cur = parent_of[cur];
        }
    }
    if (spec.features_per_part < 1) throw InvalidSpec("features_per_part must be positive");
    if (spec.noise_sigma_pos < 0 || spec.noise_sigma_normal < 0) throw InvalidSpec("noise must be non-negative");
    if (spec.dropout_prob < 0 || spec.dropout_prob >= 1) throw InvalidSpec("dropout_prob must be in [0, 1)");
    if (spec.track_lifetime < 0) throw InvalidSpec("track_lifetime must be non-negative");
    if (!(spec.frame_rate > 0)) throw InvalidSpec("frame_rate must be positive");
    for (const auto& part : spec.parts) {
        if (part.faces.empty()) throw InvalidSpec("part '" + part.name + "' has no faces");
        for (const auto& f : part.faces)
            if (!(f.area() > 0)) throw InvalidSpec("part '" + part.name + "' has a degenerate face");
    }
}

Kinematics simulate_kinematics(const ObjectSpec& spec, int frames) {
    const int n = static_cast<int>(spec.parts.size());
    Kinematics kin;
    kin.part_poses.assign(n, std::vector<Posed>(frames));
    kin.configurations.assign(spec.joints.size(), std::vector<double>(frames));

    // Parents before children.
    std::vector<int> order;
    std::queue<int> pending;
    pending.push(0);
    while (!pending.empty()) {
        const int p = pending.front();
        pending.pop();
        for (std::size_t j = 0; j < spec.joints.size(); ++j)
            if (spec.joints[j].parent == p) {
                order.push_back(static_cast<int>(j));
                pending.push(spec.joints[j].child);
            }
    }

    for (int f = 0; f < frames; ++f) {
        const double s = frames > 1 ? static_cast<double>(f) / (frames - 1) : 0.0;
        kin.part_poses[0][f] = spec.placement;
        for (int j : order) {
            const auto& joint = spec.joints[j];
            const double q = joint.profile.at(s);
            kin.configurations[j][f] = q;
            kin.part_poses[joint.child][f] = kin.part_poses[joint.parent][f] * joint.transform(q);
        }
    }
    return kin;
}

namespace {

Vec3 random_unit(std::mt19937_64& rng, std::normal_distribution<double>& gauss) {
    for (;;) {
        Vec3 v(gauss(rng), gauss(rng), gauss(rng));
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

}  // namespace

Demonstration generate(const ObjectSpec& spec, int frames, std::uint64_t seed) {
    validate(spec);
    if (frames < 10) throw InvalidSpec("a demonstration needs at least 10 frames");

    const Kinematics kin = simulate_kinematics(spec, frames);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Demonstration demo;
    demo.frame_rate = spec.frame_rate;
    GroundTruth gt;
    gt.object = spec.name;
    gt.part_poses = kin.part_poses;
    for (std::size_t j = 0; j < spec.joints.size(); ++j) gt.joints.push_back({spec.joints[j], kin.configurations[j]});

    TrajectoryId next_id = 0;
    for (int p = 0; p < static_cast<int>(spec.parts.size()); ++p) {
        const auto& faces = spec.parts[p].faces;
        std::vector<double> cumulative_area;
        double total = 0.0;
        for (const auto& f : faces) cumulative_area.push_back(total += f.area());

        for (int slot = 0; slot < spec.features_per_part; ++slot) {
            int start = 0;
            while (start < frames) {
                const double pick = unif(rng) * total;
                const auto face_it = std::lower_bound(cumulative_area.begin(), cumulative_area.end(), pick);
                const Face& face = faces[std::min<std::size_t>(face_it - cumulative_area.begin(), faces.size() - 1)];
                const double a = unif(rng), b = unif(rng);
                const Vec3 body_point = face.origin + a * face.edge_u + b * face.edge_v;
                const Vec3 body_normal = face.normal();

                int life = frames - start;
                if (spec.track_lifetime > 1.0) {
                    // Geometric lifetime with the requested mean.
                    const double u = unif(rng);
                    const double g = std::floor(std::log1p(-u) / std::log1p(-1.0 / spec.track_lifetime));
                    life = 1 + static_cast<int>(std::min(g, static_cast<double>(frames)));
                } else if (spec.track_lifetime > 0.0) {
                    life = 1;
                }
                const int end = std::min(frames, start + life);

                FeatureTrajectory track;
                track.id = next_id++;
                for (int f = start; f < end; ++f) {
                    const bool dropped = unif(rng) < spec.dropout_prob;
                    const Vec3 pos_noise(gauss(rng), gauss(rng), gauss(rng));
                    const Vec3 tilt_axis = random_unit(rng, gauss);
                    const double tilt = std::abs(gauss(rng)) * spec.noise_sigma_normal;
                    if (dropped) continue;

                    const Posed& pose = kin.part_poses[p][f];
                    FeatureObservation obs;
                    obs.frame = f;
                    obs.position = pose * body_point + (spec.noise_sigma_pos / std::sqrt(3.0)) * pos_noise;
                    const Vec3 n = pose.rotation() * body_normal;
                    obs.normal = tilt > 0.0 ? (Eigen::AngleAxisd(tilt, tilt_axis) * n).normalized() : n;
                    track.observations.push_back(obs);
                }
                if (track.observations.size() >= 2) {
                    gt.labels[track.id] = p;
                    demo.trajectories.push_back(std::move(track));
                }
                start = end;
            }
        }
    }
    demo.ground_truth = std::move(gt);
    return demo;
}

}  // namespace kinlearn
