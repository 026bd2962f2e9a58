#include "kinlearn/segment.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace kinlearn {

namespace {

double distance(const FeatureObservation& a, const FeatureObservation& b, DistanceKind kind) {
    if (kind == DistanceKind::Position) return (a.position - b.position).norm();
    return 1.0 - a.normal.dot(b.normal);
}

// Walks the common frames of two frame-sorted trajectories.
template <typename F>
void for_common_frames(const FeatureTrajectory& a, const FeatureTrajectory& b, F&& f) {
    auto ia = a.observations.begin();
    auto ib = b.observations.begin();
    while (ia != a.observations.end() && ib != b.observations.end()) {
        if (ia->frame < ib->frame)
            ++ia;
        else if (ib->frame < ia->frame)
            ++ib;
        else {
            f(*ia, *ib);
            ++ia;
            ++ib;
        }
    }
}

}  // namespace

PairStatistics pair_statistics(const FeatureTrajectory& a, const FeatureTrajectory& b, DistanceKind kind) {
    PairStatistics stats;
    for_common_frames(a, b, [&](const auto& oa, const auto& ob) { stats.samples.push_back(distance(oa, ob, kind)); });
    stats.overlap = static_cast<int>(stats.samples.size());
    if (stats.overlap > 0)
        stats.mean_distance = std::accumulate(stats.samples.begin(), stats.samples.end(), 0.0) / stats.overlap;
    return stats;
}

double kernel_similarity(const PairStatistics& stats, double gamma) {
    if (stats.overlap == 0) return 0.0;
    double sum = 0.0;
    for (double d : stats.samples) {
        const double r = d - stats.mean_distance;
        sum += std::exp(-gamma * r * r);
    }
    return sum / stats.overlap;
}

std::optional<double> pair_similarity(const FeatureTrajectory& a, const FeatureTrajectory& b,
                                      const SimilarityParams& params) {
    const bool use_pos = params.combine != CombineRule::NormalOnly;
    const bool use_normal = params.combine != CombineRule::PositionOnly;

    PairStatistics pos, nrm;
    for_common_frames(a, b, [&](const auto& oa, const auto& ob) {
        if (use_pos) pos.samples.push_back(distance(oa, ob, DistanceKind::Position));
        if (use_normal) nrm.samples.push_back(distance(oa, ob, DistanceKind::Normal));
    });
    for (auto* s : {&pos, &nrm}) {
        s->overlap = static_cast<int>(s->samples.size());
        if (s->overlap) s->mean_distance = std::accumulate(s->samples.begin(), s->samples.end(), 0.0) / s->overlap;
    }
    const int overlap = use_pos ? pos.overlap : nrm.overlap;
    if (overlap < std::max(1, params.min_overlap)) return std::nullopt;

    double similarity = 1.0;
    if (use_pos) similarity *= kernel_similarity(pos, params.gamma_pos);
    if (use_normal) similarity *= kernel_similarity(nrm, params.gamma_normal);
    return similarity;
}

SimilarityMatrix similarity_matrix(const Demonstration& demo, const SimilarityParams& params) {
    std::vector<const FeatureTrajectory*> order;
    for (const auto& t : demo.trajectories) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

    const auto n = static_cast<Eigen::Index>(order.size());
    SimilarityMatrix m;
    m.values.setConstant(n, n, std::numeric_limits<double>::quiet_NaN());
    for (auto* t : order) m.ids.push_back(t->id);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            // Disjoint time spans cannot overlap.
            if (order[i]->last_frame() < order[j]->first_frame() || order[j]->last_frame() < order[i]->first_frame())
                continue;
            if (const auto s = pair_similarity(*order[i], *order[j], params)) m.values(i, j) = m.values(j, i) = *s;
        }
    }
    return m;
}

std::vector<int> dbscan(const Eigen::MatrixXd& distance, double eps, int min_pts) {
    if (!(eps >= 0.0) || min_pts < 1) throw InvalidSpec("dbscan needs eps >= 0 and min_pts >= 1");
    constexpr int kUnvisited = -2;
    const auto n = distance.rows();
    std::vector<int> labels(n, kUnvisited);

    const auto neighbours = [&](Eigen::Index i) {
        std::vector<Eigen::Index> out;
        for (Eigen::Index j = 0; j < n; ++j)
            if (distance(i, j) <= eps) out.push_back(j);
        return out;
    };

    int next_cluster = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        const auto seeds = neighbours(i);
        if (static_cast<int>(seeds.size()) < min_pts) {
            labels[i] = ClusterAssignment::kNoise;
            continue;
        }
        const int c = next_cluster++;
        labels[i] = c;
        std::deque<Eigen::Index> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const auto j = queue.front();
            queue.pop_front();
            if (labels[j] == ClusterAssignment::kNoise) labels[j] = c;  // border point
            if (labels[j] != kUnvisited) continue;
            labels[j] = c;
            const auto more = neighbours(j);
            if (static_cast<int>(more.size()) >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
        }
    }
    return labels;
}

ClusterAssignment cluster(const SimilarityMatrix& matrix, const DbscanParams& params) {
    const Eigen::MatrixXd dist =
        matrix.values.unaryExpr([](double s) { return std::isnan(s) ? std::numeric_limits<double>::infinity() : 1.0 - s; });
    const auto labels = dbscan(dist, params.eps, params.min_pts);

    ClusterAssignment out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.labels[matrix.ids[i]] = labels[i];
        if (labels[i] < 0) continue;
        if (labels[i] >= out.cluster_count()) out.clusters.resize(labels[i] + 1);
        out.clusters[labels[i]].push_back(matrix.ids[i]);
    }
    return out;
}

}  // namespace kinlearn
