#pragma once

// Relative-motion similarity between feature trajectories and density-based
// clustering of trajectories into rigidly moving groups.

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "kinlearn/demo.hpp"

namespace kinlearn {

enum class CombineRule { Product, PositionOnly, NormalOnly };

struct SimilarityParams {
    /// Bandwidth for positional distances, 1/m^2 (1 / (2 cm)^2).
    double gamma_pos = 2500.0;
    /// Bandwidth for normal distances 1 - n_i.n_j (dimensionless).
    double gamma_normal = 1.0 / std::cos(15.0 * 3.14159265358979323846 / 180.0);
    /// Pairs sharing fewer frames than this have undefined similarity.
    int min_overlap = 10;
    CombineRule combine = CombineRule::Product;
};

enum class DistanceKind { Position, Normal };

/// Per-frame distances over the frames two trajectories share.
struct PairStatistics {
    int overlap = 0;
    double mean_distance = 0.0;
    std::vector<double> samples;
};

PairStatistics pair_statistics(const FeatureTrajectory& a, const FeatureTrajectory& b, DistanceKind kind);

/// (1/T) sum_t exp(-gamma (d_t - mean)^2); 0 overlap gives 0.
double kernel_similarity(const PairStatistics& stats, double gamma);

/// nullopt when the overlap is below params.min_overlap.
std::optional<double> pair_similarity(const FeatureTrajectory& a, const FeatureTrajectory& b,
                                      const SimilarityParams& params = {});

/// Rows/columns follow ascending trajectory id. Undefined entries are NaN.
struct SimilarityMatrix {
    std::vector<TrajectoryId> ids;
    Eigen::MatrixXd values;

    bool defined(Eigen::Index i, Eigen::Index j) const { return !std::isnan(values(i, j)); }
    Eigen::Index size() const { return values.rows(); }
};

SimilarityMatrix similarity_matrix(const Demonstration& demo, const SimilarityParams& params = {});

struct ClusterAssignment {
    static constexpr int kNoise = -1;

    std::map<TrajectoryId, int> labels;                 // trajectory -> cluster or kNoise
    std::vector<std::vector<TrajectoryId>> clusters;  // cluster -> members, ascending

    int cluster_count() const { return static_cast<int>(clusters.size()); }
};

struct DbscanParams {
    double eps = 0.2;  // on the distance 1 - L
    int min_pts = 5;   // neighbourhood size, the point itself included
};

/// DBSCAN over a dense distance matrix (NaN/inf = not neighbours). Points are
/// visited in index order; a border point joins the first cluster that
/// reaches it. Returns one label per row, kNoise for noise.
std::vector<int> dbscan(const Eigen::MatrixXd& distance, double eps, int min_pts);

/// Clusters trajectories on distance 1 - L.
ClusterAssignment cluster(const SimilarityMatrix& matrix, const DbscanParams& params = {});

}  // namespace kinlearn
