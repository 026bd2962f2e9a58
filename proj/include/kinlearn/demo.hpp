#pragma once

// Feature-trajectory data model, the .traj/.gt file formats and a synthetic
// demonstration generator for articulated objects.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kinlearn/geom.hpp"
#include "kinlearn/joint_kind.hpp"

namespace kinlearn {

using TrajectoryId = std::int64_t;

struct FeatureObservation {
    int frame = 0;
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();

    friend bool operator==(const FeatureObservation&, const FeatureObservation&) = default;
};

struct FeatureTrajectory {
    TrajectoryId id = 0;
    std::vector<FeatureObservation> observations;  // strictly increasing frames

    int first_frame() const { return observations.front().frame; }
    int last_frame() const { return observations.back().frame; }

    friend bool operator==(const FeatureTrajectory&, const FeatureTrajectory&) = default;
};

enum class ProfileKind { Ramp, Smoothstep, Sinusoid, HoldThenMove };

std::string_view to_string(ProfileKind kind);
std::optional<ProfileKind> parse_profile_kind(std::string_view name);

/// Joint configuration as a function of normalized demo time s in [0, 1].
struct MotionProfile {
    ProfileKind kind = ProfileKind::Ramp;
    double from = 0.0;
    double to = 0.0;
    double cycles = 1.0;         // Sinusoid: open/close cycles over the demo
    double hold_fraction = 0.3;  // HoldThenMove: leading fraction held at `from`

    double at(double s) const;

    friend bool operator==(const MotionProfile&, const MotionProfile&) = default;
};

/// Joint between two parts. Axis and origin are in the object's rest frame;
/// child pose = parent pose * joint_transform(q).
struct JointSpec {
    int parent = 0;
    int child = 1;
    JointKind type = JointKind::Rigid;
    Vec3 axis = Vec3::UnitZ();
    Vec3 origin = Vec3::Zero();
    MotionProfile profile;

    Posed transform(double q) const;

    friend bool operator==(const JointSpec&, const JointSpec&) = default;
};

/// Planar rectangle origin + s*edge_u + t*edge_v, s,t in [0,1].
struct Face {
    Vec3 origin = Vec3::Zero();
    Vec3 edge_u = Vec3::UnitX();
    Vec3 edge_v = Vec3::UnitY();

    Vec3 normal() const { return edge_u.cross(edge_v).normalized(); }
    double area() const { return edge_u.cross(edge_v).norm(); }

    friend bool operator==(const Face&, const Face&) = default;
};

struct PartSpec {
    std::string name;
    std::vector<Face> faces;  // feature-bearing surfaces, rest frame

    friend bool operator==(const PartSpec&, const PartSpec&) = default;
};

struct ObjectSpec {
    std::string name;
    std::vector<PartSpec> parts;  // part 0 is the root
    std::vector<JointSpec> joints;
    Posed placement;  // object rest frame -> world
    int features_per_part = 40;
    double noise_sigma_pos = 0.0;     // meters, RMS of the 3-D displacement (sigma/sqrt(3) per axis)
    double noise_sigma_normal = 0.0;  // radians
    double dropout_prob = 0.0;        // per observation
    double track_lifetime = 0.0;      // mean frames; 0 keeps every track alive
    double frame_rate = 30.0;

    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct GroundTruthJoint {
    JointSpec spec;
    std::vector<double> configurations;  // q per frame

    friend bool operator==(const GroundTruthJoint&, const GroundTruthJoint&) = default;
};

struct GroundTruth {
    std::string object;
    std::map<TrajectoryId, int> labels;         // trajectory -> part
    std::vector<std::vector<Posed>> part_poses;  // [part][frame], rest frame -> world
    std::vector<GroundTruthJoint> joints;

    int part_count() const { return static_cast<int>(part_poses.size()); }
    int frame_count() const { return part_poses.empty() ? 0 : static_cast<int>(part_poses.front().size()); }

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Demonstration {
    double frame_rate = 30.0;
    std::vector<FeatureTrajectory> trajectories;
    std::optional<GroundTruth> ground_truth;

    /// One past the last observed frame.
    int frame_count() const;
    const FeatureTrajectory* find(TrajectoryId id) const;

    friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

/// Throws InvalidSpec when joints do not form a tree rooted at part 0 or an
/// axis is not unit length.
void validate(const ObjectSpec& spec);

/// Per-frame part poses (rest frame -> world) and joint configurations.
struct Kinematics {
    std::vector<std::vector<Posed>> part_poses;  // [part][frame]
    std::vector<std::vector<double>> configurations;  // [joint][frame]
};
Kinematics simulate_kinematics(const ObjectSpec& spec, int frames);

/// Deterministic for a fixed seed.
Demonstration generate(const ObjectSpec& spec, int frames, std::uint64_t seed);

/// Named catalog: door, drawer, fridge, laptop, microwave, chair, monitor.
std::map<std::string, ObjectSpec> default_specs();

inline constexpr int kTrajSchemaVersion = 1;
inline constexpr int kGroundTruthSchemaVersion = 1;

void write_trajectories(const Demonstration& demo, std::ostream& out);
/// Reads the .traj body; ground truth is left empty.
Demonstration read_trajectories(std::istream& in);

std::filesystem::path ground_truth_path(const std::filesystem::path& traj_path);

/// Writes `path` and, when ground truth is present, the `.gt` sidecar.
void save(const Demonstration& demo, const std::filesystem::path& path);
/// Reads `path` and the `.gt` sidecar if it exists.
Demonstration load(const std::filesystem::path& path);

std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

std::string object_spec_to_json(const ObjectSpec& spec);
ObjectSpec object_spec_from_json(const std::string& text);

}  // namespace kinlearn
