#pragma once

// Per-cluster SE(3) trajectories: robust frame-to-frame alignment, sparse
// long-range constraints and a constant-velocity regularized batch smoother.
//
// Pose convention: x_t maps a cluster point's world position at the reference
// frame to its world position at frame t, so x_ref = identity and
// p_t = x_t * p_ref. A measured delta D between frames s and t satisfies
// x_t ~= D * x_s.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kinlearn/demo.hpp"
#include "kinlearn/segment.hpp"

namespace kinlearn {

/// Members of one cluster observed at one frame, ids ascending.
struct ClusterFrameSet {
    int cluster = 0;
    int frame = 0;
    std::vector<TrajectoryId> ids;
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;

    std::size_t size() const { return ids.size(); }
};

/// One frame set per frame in which the cluster has at least one member.
std::vector<ClusterFrameSet> cluster_frame_sets(const Demonstration& demo, const std::vector<TrajectoryId>& members,
                                                int cluster);

struct DeltaEstimate {
    Posed delta;  // curr ~= delta * prev, world frame
    std::vector<TrajectoryId> inliers;
};

/// Robust alignment of the features common to both frame sets. Starts from
/// the all-points fit; when that leaves more than half of the points outside
/// the threshold, seeds from the best of ~100 random 3-point samples. Then
/// alternates fit / reclassify until the inlier set stops changing (at most
/// 20 rounds). Throws InsufficientCorrespondences below 3 common ids (or 3
/// inliers) and propagates DegenerateGeometry.
DeltaEstimate estimate_delta(const ClusterFrameSet& prev, const ClusterFrameSet& curr, double inlier_threshold = 0.01,
                             std::uint64_t seed = 0);

enum class ConstraintKind { Consecutive, Sparse, Velocity };

std::string_view to_string(ConstraintKind kind);

struct PoseConstraint {
    ConstraintKind kind = ConstraintKind::Consecutive;
    std::vector<int> frames;  // (s, t) for relative constraints, (t-1, t, t+1) for velocity
    std::optional<Posed> measured;  // absent for velocity
    double weight = 1.0;
};

struct PoseGraphParams {
    double inlier_threshold = 0.01;  // meters
    int sparse_stride = 10;
    double velocity_weight_factor = 0.1;  // times the median consecutive weight
    int max_iterations = 50;
    double relative_tolerance = 1e-8;
    std::uint64_t seed = 0;
};

/// Consecutive constraints between adjacent frames (t-1, t), sparse ones
/// between (t - stride, t), velocity ones for every t with t-1 and t+1
/// present. Pairs whose alignment fails are skipped. Weights are inlier
/// counts; velocity weight is factor * median consecutive weight.
std::vector<PoseConstraint> build_constraints(const std::vector<ClusterFrameSet>& frames,
                                              const PoseGraphParams& params = {});

struct OptimizerReport {
    int iterations = 0;
    bool converged = true;  // false: iteration cap hit, best iterate kept
    double initial_cost = 0.0;
    double final_cost = 0.0;
};

struct ClusterPoseSequence {
    int cluster = 0;
    std::vector<TrajectoryId> members;
    /// Centroid of the members at the reference frame; anchors a body frame
    /// (origin at the anchor, world-aligned axes at the reference frame).
    Vec3 anchor = Vec3::Zero();
    int reference_frame = 0;
    std::map<int, Posed> poses;   // frame -> x_t
    std::map<int, int> inliers;   // frame -> inlier count supporting x_t
    OptimizerReport report;

    /// Body frame to world at `frame`: x_t * Translation(anchor).
    Posed anchored(int frame) const { return poses.at(frame) * Posed::Translation(anchor); }

    friend bool operator==(const ClusterPoseSequence& a, const ClusterPoseSequence& b) {
        return a.cluster == b.cluster && a.members == b.members && a.anchor == b.anchor &&
               a.reference_frame == b.reference_frame && a.poses == b.poses && a.inliers == b.inliers;
    }
};

/// Total cost sum w |r|^2 of `constraints` at `poses`, residuals taken in a
/// frame centred at `origin`. Constraints touching a frame without a pose are
/// ignored.
double constraint_cost(const std::vector<PoseConstraint>& constraints, const std::map<int, Posed>& poses,
                       const Vec3& origin = Vec3::Zero());

/// Gauss-Newton over right-multiplied tangent increments, first pose held
/// fixed, residuals taken about `initial.anchor`. Stops when the relative
/// cost decrease falls below the tolerance or at the iteration cap. The
/// returned cost never exceeds the initial one.
ClusterPoseSequence optimize(const std::vector<PoseConstraint>& constraints, ClusterPoseSequence initial,
                             const PoseGraphParams& params = {});

/// Chains measured relative constraints outward from `reference_frame`
/// (breadth first, consecutive before sparse). Frames not reachable from the
/// reference are absent from the result.
std::map<int, Posed> chain_poses(const std::vector<PoseConstraint>& constraints, int reference_frame);

/// Full per-cluster pipeline. Clusters that never have 3 aligned features in
/// two frames are dropped and named in `warnings`.
std::vector<ClusterPoseSequence> estimate_cluster_poses(const Demonstration& demo, const ClusterAssignment& assignment,
                                                        const PoseGraphParams& params = {},
                                                        std::vector<std::string>* warnings = nullptr);

}  // namespace kinlearn
