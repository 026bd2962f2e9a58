#pragma once

// Kinematic tree over clusters: minimum spanning tree on per-pair BIC,
// prediction at new configurations, a JSON model database and evaluation
// against generator ground truth.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinlearn/demo.hpp"
#include "kinlearn/joints.hpp"
#include "kinlearn/posegraph.hpp"

namespace kinlearn {

struct GraphEdge {
    int i = 0;  // i < j; the model maps q to X_j^-1 X_i
    int j = 1;
    JointModel model;
    std::vector<JointModel> candidates;  // every kind that was fitted
    FitError fit_error;
};

struct KinematicGraph {
    std::string object;
    std::vector<ClusterPoseSequence> vertices;  // ascending cluster id
    std::vector<GraphEdge> edges;
    int root = 0;

    const ClusterPoseSequence& vertex(int id) const;
    const GraphEdge* edge(int a, int b) const;
};

/// Candidate edge for the spanning tree.
struct WeightedPair {
    double cost = 0.0;
    int i = 0;
    int j = 0;
};

/// Kruskal over `candidates` on vertices `ids`; ties go to the
/// lexicographically smallest (i, j). Returns indices into `candidates`.
/// Throws DisconnectedParts when no spanning tree exists.
std::vector<std::size_t> spanning_tree(const std::vector<int>& ids, const std::vector<WeightedPair>& candidates);

/// Pairs sharing at least 3 posed frames get select_model; the edge cost is
/// the winner's BIC. One vertex gives an edgeless graph and a warning.
KinematicGraph build_graph(std::vector<ClusterPoseSequence> pose_seqs, const NoiseModel& noise = {},
                           std::vector<std::string>* warnings = nullptr);

using EdgeKey = std::pair<int, int>;  // (i, j), i < j

struct Prediction {
    std::map<int, Posed> poses;         // vertex id -> anchored body pose
    std::vector<EdgeKey> extrapolated;  // edges whose q lies outside the observed range
};

/// Root gets `base_pose`; every other part follows its tree edge. Non-rigid
/// edges without a configuration throw MissingConfiguration.
Prediction predict(const KinematicGraph& graph, const std::map<EdgeKey, double>& configurations,
                   const Posed& base_pose = Posed::Identity());

struct Provenance {
    std::string demo_file;
    std::string date;  // left empty unless supplied, so files stay reproducible
    NoiseModel noise;
    SimilarityParams similarity;
    DbscanParams dbscan;
    PoseGraphParams posegraph;
};

struct ModelEntry {
    KinematicGraph graph;
    Provenance provenance;
};

inline constexpr int kDatabaseSchemaVersion = 1;

class ModelDatabase {
public:
    /// Throws DuplicateObject when the id is taken.
    void insert(ModelEntry entry);
    /// Throws UnknownObject.
    const ModelEntry& at(const std::string& object) const;
    bool contains(const std::string& object) const { return entries_.contains(object); }
    const std::map<std::string, ModelEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, ModelEntry> entries_;
};

std::string database_to_json(const ModelDatabase& db);
ModelDatabase database_from_json(const std::string& text);
void save_db(const ModelDatabase& db, const std::filesystem::path& path);
ModelDatabase load_db(const std::filesystem::path& path);

/// Structural equality: same vertices, poses, edges and model parameters.
bool same_graph(const KinematicGraph& a, const KinematicGraph& b);

struct PartReport {
    int vertex = 0;
    int part = -1;  // majority ground-truth part
    int members = 0;
    int mislabeled = 0;
    int frames = 0;
    double mean_translation = 0.0;  // meters
    double rmse_translation = 0.0;
    double mean_rotation = 0.0;  // degrees
    double rmse_rotation = 0.0;
};

struct EdgeReport {
    EdgeKey edge;
    JointKind kind = JointKind::Rigid;
    std::optional<JointKind> truth;  // none: no ground-truth joint between the parts
    bool type_correct = false;
    std::optional<double> axis_angle_error;     // degrees
    std::optional<double> axis_position_error;  // meters, revolute only
    FitError fit_error;
};

struct EvalReport {
    std::string object;
    std::vector<PartReport> parts;
    std::vector<EdgeReport> edges;
    int mislabeled = 0;
    int unassigned = 0;  // labeled trajectories outside every vertex
    bool structure_correct = false;
    bool types_correct = false;
    double mean_translation = 0.0;  // over all parts and frames
    double mean_rotation = 0.0;     // degrees
    bool success = false;           // mean errors below 10 cm and 25 degrees
};

EvalReport evaluate(const KinematicGraph& graph, const GroundTruth& truth);

}  // namespace kinlearn
