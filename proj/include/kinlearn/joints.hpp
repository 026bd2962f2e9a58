#pragma once

// Joint models between two rigid parts: fitting, likelihood, BIC selection.
//
// A model maps a configuration q to the pose of part i expressed in the body
// frame of part j (Delta = relative(X_i, X_j)). Axes and centres therefore
// live in j's body frame.

#include <string>
#include <vector>

#include "kinlearn/geom.hpp"
#include "kinlearn/joint_kind.hpp"
#include "kinlearn/posegraph.hpp"

namespace kinlearn {

struct RelativePoseSequence {
    int part_i = 0;
    int part_j = 1;
    std::vector<int> frames;
    std::vector<Posed> deltas;

    std::size_t size() const { return deltas.size(); }
    bool empty() const { return deltas.empty(); }
};

/// Frames where both clusters have poses, Delta_t = relative(X_i(t), X_j(t))
/// on the anchored body poses.
RelativePoseSequence relative_sequence(const ClusterPoseSequence& i, const ClusterPoseSequence& j);

struct NoiseModel {
    double sigma_pos = 0.01;   // meters
    double sigma_rot = 0.087;  // radians
};

/// Throws InvalidSpec unless both sigmas are positive.
void validate(const NoiseModel& noise);

/// Log density of a zero-mean normal with standard deviation sigma at x.
double log_normal(double x, double sigma);

struct JointModel {
    JointKind kind = JointKind::Rigid;
    /// Pose at q = 0. For a rigid joint this is the constant delta.
    Posed base;
    /// Unit direction (prismatic) or rotation axis (revolute), j frame.
    Vec3 axis = Vec3::UnitZ();
    /// A point on the rotation axis (revolute), j frame.
    Vec3 center = Vec3::Zero();
    /// Distance of part i's origin from the axis (revolute).
    double radius = 0.0;
    double radius_sigma = 0.0;

    std::vector<int> frames;             // frames the model was fitted on
    std::vector<double> configurations;  // q per frame, empty for rigid
    double q_min = 0.0;
    double q_max = 0.0;

    int n = 0;  // observations
    double loglik = 0.0;
    double bic = 0.0;
    /// Set when the motion does not determine the model (too little travel,
    /// radius below its own uncertainty). The fit is still usable.
    bool degenerate = false;

    int parameter_count() const;
    /// Model-predicted delta at configuration q (q is ignored for rigid).
    Posed predict(double q) const;
};

int parameter_count(JointKind kind);

/// Each fit also evaluates loglik and BIC under `noise`.
JointModel fit_rigid(const RelativePoseSequence& seq, const NoiseModel& noise = {});
JointModel fit_prismatic(const RelativePoseSequence& seq, const NoiseModel& noise = {});
JointModel fit_revolute(const RelativePoseSequence& seq, const NoiseModel& noise = {});
JointModel fit(JointKind kind, const RelativePoseSequence& seq, const NoiseModel& noise = {});

/// Sum over frames of log N(|translation residual|; sigma_pos) +
/// log N(angle residual; sigma_rot) at the stored configurations.
double loglik(const JointModel& model, const RelativePoseSequence& seq, const NoiseModel& noise = {});

/// -2 loglik + p log n.
double bic(double loglik, int parameters, int n);

/// Configuration that best explains `observed` under the model (weighted
/// translation and angle residuals).
double project_configuration(const JointModel& model, const Posed& observed, const NoiseModel& noise = {});

struct FitError {
    double position = 0.0;  // meters, mean over frames
    double angle = 0.0;     // degrees, mean over frames
};

/// Mean residual at the per-frame best configuration.
FitError model_fit_error(const JointModel& model, const RelativePoseSequence& seq, const NoiseModel& noise = {});

struct ModelSelection {
    JointModel best;
    std::vector<JointModel> candidates;  // rigid, prismatic, revolute
};

/// Fits every kind and returns the lowest BIC; ties go to fewer parameters,
/// then to kind order.
ModelSelection select_model(const RelativePoseSequence& seq, const NoiseModel& noise = {});

}  // namespace kinlearn
