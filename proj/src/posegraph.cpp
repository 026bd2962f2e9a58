#include "kinlearn/posegraph.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <random>

namespace kinlearn {

std::vector<ClusterFrameSet> cluster_frame_sets(const Demonstration& demo, const std::vector<TrajectoryId>& members,
                                                int cluster) {
    std::vector<TrajectoryId> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    std::map<int, ClusterFrameSet> by_frame;
    for (TrajectoryId id : sorted) {
        const FeatureTrajectory* t = demo.find(id);
        if (!t) continue;
        for (const auto& o : t->observations) {
            auto& set = by_frame[o.frame];
            set.cluster = cluster;
            set.frame = o.frame;
            set.ids.push_back(id);
            set.positions.push_back(o.position);
            set.normals.push_back(o.normal);
        }
    }
    std::vector<ClusterFrameSet> out;
    out.reserve(by_frame.size());
    for (auto& [frame, set] : by_frame) out.push_back(std::move(set));
    return out;
}

namespace {

struct Correspondences {
    std::vector<TrajectoryId> ids;
    std::vector<Vec3> src, dst;
};

Correspondences common_points(const ClusterFrameSet& a, const ClusterFrameSet& b) {
    Correspondences c;
    std::size_t i = 0, j = 0;
    while (i < a.ids.size() && j < b.ids.size()) {
        if (a.ids[i] < b.ids[j])
            ++i;
        else if (b.ids[j] < a.ids[i])
            ++j;
        else {
            c.ids.push_back(a.ids[i]);
            c.src.push_back(a.positions[i]);
            c.dst.push_back(b.positions[j]);
            ++i;
            ++j;
        }
    }
    return c;
}

std::vector<std::size_t> inliers_of(const Posed& T, const Correspondences& c, double threshold) {
    std::vector<std::size_t> in;
    for (std::size_t k = 0; k < c.src.size(); ++k)
        if ((T * c.src[k] - c.dst[k]).norm() < threshold) in.push_back(k);
    return in;
}

Posed fit_subset(const Correspondences& c, const std::vector<std::size_t>& subset) {
    std::vector<Vec3> s, d;
    s.reserve(subset.size());
    d.reserve(subset.size());
    for (std::size_t k : subset) {
        s.push_back(c.src[k]);
        d.push_back(c.dst[k]);
    }
    return align_point_sets(s, d);
}

}  // namespace

DeltaEstimate estimate_delta(const ClusterFrameSet& prev, const ClusterFrameSet& curr, double inlier_threshold,
                             std::uint64_t seed) {
    const Correspondences c = common_points(prev, curr);
    const std::size_t n = c.ids.size();
    if (n < 3)
        throw InsufficientCorrespondences("frames " + std::to_string(prev.frame) + " and " +
                                          std::to_string(curr.frame) + " share " + std::to_string(n) +
                                          " features, need 3");

    Posed T = align_point_sets(c.src, c.dst);
    std::vector<std::size_t> inliers = inliers_of(T, c, inlier_threshold);

    if (2 * inliers.size() < n) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(prev.cluster), static_cast<std::uint32_t>(prev.frame),
                          static_cast<std::uint32_t>(curr.frame)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> best;
        for (int trial = 0; trial < 100; ++trial) {
            std::size_t a = pick(rng), b = pick(rng), d = pick(rng);
            if (a == b || a == d || b == d) continue;
            Posed candidate;
            try {
                candidate = fit_subset(c, {a, b, d});
            } catch (const DegenerateGeometry&) {
                continue;
            }
            auto in = inliers_of(candidate, c, inlier_threshold);
            if (in.size() > best.size()) best = std::move(in);
        }
        if (best.size() >= 3) inliers = std::move(best);
    }

    for (int round = 0; round < 20; ++round) {
        if (inliers.size() < 3) break;
        T = fit_subset(c, inliers);
        auto next = inliers_of(T, c, inlier_threshold);
        if (next == inliers) break;
        inliers = std::move(next);
    }
    if (inliers.size() < 3)
        throw InsufficientCorrespondences("frames " + std::to_string(prev.frame) + " and " +
                                          std::to_string(curr.frame) + " have fewer than 3 inliers");

    DeltaEstimate out{T, {}};
    for (std::size_t k : inliers) out.inliers.push_back(c.ids[k]);
    return out;
}

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::Consecutive: return "consecutive";
        case ConstraintKind::Sparse: return "sparse";
        case ConstraintKind::Velocity: return "velocity";
    }
    return "?";
}

std::vector<PoseConstraint> build_constraints(const std::vector<ClusterFrameSet>& frames,
                                              const PoseGraphParams& params) {
    std::vector<PoseConstraint> out;
    std::map<int, const ClusterFrameSet*> by_frame;
    for (const auto& f : frames) by_frame[f.frame] = &f;

    const auto add = [&](ConstraintKind kind, const ClusterFrameSet& a, const ClusterFrameSet& b) {
        try {
            const auto d = estimate_delta(a, b, params.inlier_threshold, params.seed);
            out.push_back({kind, {a.frame, b.frame}, d.delta, static_cast<double>(d.inliers.size())});
        } catch (const InsufficientCorrespondences&) {
        } catch (const DegenerateGeometry&) {
        }
    };

    for (const auto& [frame, set] : by_frame)
        if (auto it = by_frame.find(frame - 1); it != by_frame.end()) add(ConstraintKind::Consecutive, *it->second, *set);
    if (params.sparse_stride > 1)
        for (const auto& [frame, set] : by_frame)
            if (auto it = by_frame.find(frame - params.sparse_stride); it != by_frame.end())
                add(ConstraintKind::Sparse, *it->second, *set);

    std::vector<double> consecutive;
    for (const auto& c : out)
        if (c.kind == ConstraintKind::Consecutive) consecutive.push_back(c.weight);
    if (consecutive.empty() || params.velocity_weight_factor <= 0.0) return out;
    std::nth_element(consecutive.begin(), consecutive.begin() + consecutive.size() / 2, consecutive.end());
    const double vw = params.velocity_weight_factor * consecutive[consecutive.size() / 2];
    for (const auto& [frame, set] : by_frame)
        if (by_frame.contains(frame - 1) && by_frame.contains(frame + 1))
            out.push_back({ConstraintKind::Velocity, {frame - 1, frame, frame + 1}, std::nullopt, vw});
    return out;
}

namespace {

Vec6 residual(const PoseConstraint& c, const std::array<Posed, 3>& x) {
    if (c.kind == ConstraintKind::Velocity)
        return log(inverse(relative(x[0], x[1])) * relative(x[1], x[2])).vector();
    return log(inverse(*c.measured) * x[1] * inverse(x[0])).vector();
}

std::size_t arity(const PoseConstraint& c) { return c.kind == ConstraintKind::Velocity ? 3 : 2; }

bool usable(const PoseConstraint& c, const std::map<int, Posed>& poses) {
    if (c.frames.size() != arity(c)) return false;
    if (c.kind != ConstraintKind::Velocity && !c.measured) return false;
    return std::all_of(c.frames.begin(), c.frames.end(), [&](int f) { return poses.contains(f); });
}

std::array<Posed, 3> gather(const PoseConstraint& c, const std::map<int, Posed>& poses) {
    std::array<Posed, 3> x;
    for (std::size_t k = 0; k < c.frames.size(); ++k) x[k] = poses.at(c.frames[k]);
    return x;
}

// Re-expresses world-frame motions about `origin`: A^-1 p A with A = T(origin).
Posed about(const Posed& p, const Vec3& origin) {
    return Posed::Translation(-origin) * p * Posed::Translation(origin);
}

std::vector<PoseConstraint> about(std::vector<PoseConstraint> constraints, const Vec3& origin) {
    for (auto& c : constraints)
        if (c.measured) c.measured = about(*c.measured, origin);
    return constraints;
}

std::map<int, Posed> about(std::map<int, Posed> poses, const Vec3& origin) {
    for (auto& [_, p] : poses) p = about(p, origin);
    return poses;
}

}  // namespace

double constraint_cost(const std::vector<PoseConstraint>& constraints, const std::map<int, Posed>& poses,
                       const Vec3& origin) {
    const auto local = about(constraints, origin);
    const auto x = about(poses, origin);
    double cost = 0.0;
    for (const auto& c : local)
        if (usable(c, x)) cost += c.weight * residual(c, gather(c, x)).squaredNorm();
    return cost;
}

ClusterPoseSequence optimize(const std::vector<PoseConstraint>& constraints, ClusterPoseSequence initial,
                             const PoseGraphParams& params) {
    // Residuals are taken about the cluster anchor; about the world origin the
    // lever arm lets rotation noise dominate the metric.
    const auto local = about(constraints, initial.anchor);
    auto poses = about(std::move(initial.poses), initial.anchor);
    OptimizerReport report;
    std::vector<const PoseConstraint*> active;
    for (const auto& c : local)
        if (usable(c, poses) && c.weight > 0.0) active.push_back(&c);

    // The first pose carries the gauge; every other pose is a variable.
    std::map<int, int> index;
    const int fixed = poses.empty() ? 0 : (poses.contains(initial.reference_frame) ? initial.reference_frame
                                                                                   : poses.begin()->first);
    for (const auto& [frame, _] : poses)
        if (frame != fixed) index.emplace(frame, static_cast<int>(index.size()));
    const int n = static_cast<int>(index.size()) * 6;

    const auto cost_of = [&](const std::map<int, Posed>& p) {
        double cost = 0.0;
        for (const auto* c : active) cost += c->weight * residual(*c, gather(*c, p)).squaredNorm();
        return cost;
    };

    double cost = cost_of(poses);
    report.initial_cost = report.final_cost = cost;
    const auto finish = [&] {
        initial.poses = about(std::move(poses), -initial.anchor);
        initial.report = report;
        return std::move(initial);
    };
    if (n == 0 || active.empty() || cost <= 0.0) return finish();

    constexpr double h = 1e-6;
    report.converged = false;
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        report.iterations = iter + 1;
        std::vector<Eigen::Triplet<double>> triplets;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (const auto* c : active) {
            std::array<Posed, 3> x = gather(*c, poses);
            const Vec6 r = residual(*c, x);
            const std::size_t m = arity(*c);
            std::array<Eigen::Matrix<double, 6, 6>, 3> J;
            std::array<int, 3> col{-1, -1, -1};
            for (std::size_t k = 0; k < m; ++k) {
                auto it = index.find(c->frames[k]);
                if (it == index.end()) continue;
                col[k] = it->second * 6;
                const Posed base = x[k];
                for (int d = 0; d < 6; ++d) {
                    Vec6 e = Vec6::Zero();
                    e[d] = h;
                    x[k] = base * exp(Twistd(e));
                    const Vec6 rp = residual(*c, x);
                    x[k] = base * exp(Twistd(Vec6(-e)));
                    const Vec6 rm = residual(*c, x);
                    J[k].col(d) = (rp - rm) / (2 * h);
                }
                x[k] = base;
            }
            for (std::size_t a = 0; a < m; ++a) {
                if (col[a] < 0) continue;
                g.segment<6>(col[a]) += c->weight * J[a].transpose() * r;
                for (std::size_t b = 0; b < m; ++b) {
                    if (col[b] < 0) continue;
                    const Eigen::Matrix<double, 6, 6> block = c->weight * J[a].transpose() * J[b];
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j) triplets.emplace_back(col[a] + i, col[b] + j, block(i, j));
                }
            }
        }
        Eigen::SparseMatrix<double> H(n, n);
        H.setFromTriplets(triplets.begin(), triplets.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(H);
        if (solver.info() != Eigen::Success) break;
        const Eigen::VectorXd step = solver.solve(-g);
        if (solver.info() != Eigen::Success || !step.allFinite()) break;

        // Backtrack until the cost drops; the best iterate is always kept.
        bool improved = false;
        double scale = 1.0;
        std::map<int, Posed> trial;
        double trial_cost = cost;
        for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
            trial = poses;
            for (const auto& [frame, i] : index)
                trial[frame] = poses.at(frame) * exp(Twistd(Vec6(scale * step.segment<6>(i * 6))));
            trial_cost = cost_of(trial);
            if (trial_cost < cost) {
                improved = true;
                break;
            }
        }
        if (!improved) {
            report.converged = true;
            break;
        }
        const double decrease = (cost - trial_cost) / cost;
        poses = std::move(trial);
        cost = trial_cost;
        // The second test catches a residual already at rounding level.
        if (decrease < params.relative_tolerance || cost <= 1e-16 * report.initial_cost) {
            report.converged = true;
            break;
        }
    }
    report.final_cost = cost;
    return finish();
}

std::map<int, Posed> chain_poses(const std::vector<PoseConstraint>& constraints, int reference_frame) {
    std::map<int, std::vector<const PoseConstraint*>> adjacent;
    // Consecutive first so the chain prefers short hops.
    for (ConstraintKind kind : {ConstraintKind::Consecutive, ConstraintKind::Sparse})
        for (const auto& c : constraints)
            if (c.kind == kind && c.measured && c.frames.size() == 2) {
                adjacent[c.frames[0]].push_back(&c);
                adjacent[c.frames[1]].push_back(&c);
            }

    std::map<int, Posed> poses{{reference_frame, Posed::Identity()}};
    std::deque<int> queue{reference_frame};
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        for (const auto* c : adjacent[f]) {
            const bool forward = c->frames[0] == f;
            const int other = forward ? c->frames[1] : c->frames[0];
            if (poses.contains(other)) continue;
            // x_t = D x_s
            poses[other] = forward ? *c->measured * poses.at(f) : inverse(*c->measured) * poses.at(f);
            queue.push_back(other);
        }
    }
    return poses;
}

std::vector<ClusterPoseSequence> estimate_cluster_poses(const Demonstration& demo, const ClusterAssignment& assignment,
                                                        const PoseGraphParams& params,
                                                        std::vector<std::string>* warnings) {
    std::vector<ClusterPoseSequence> out;
    for (int k = 0; k < assignment.cluster_count(); ++k) {
        const auto& members = assignment.clusters[k];
        const auto frames = cluster_frame_sets(demo, members, k);
        const auto constraints = build_constraints(frames, params);

        int reference = std::numeric_limits<int>::max();
        for (const auto& c : constraints)
            if (c.measured) reference = std::min(reference, c.frames.front());
        if (reference == std::numeric_limits<int>::max()) {
            if (warnings)
                warnings->push_back("cluster " + std::to_string(k) +
                                    " dropped: no two frames with 3 aligned features");
            continue;
        }

        ClusterPoseSequence seq;
        seq.cluster = k;
        seq.members = members;
        seq.reference_frame = reference;
        const auto ref_set = std::find_if(frames.begin(), frames.end(), [&](const auto& f) { return f.frame == reference; });
        for (const auto& p : ref_set->positions) seq.anchor += p;
        seq.anchor /= static_cast<double>(ref_set->size());
        seq.poses = chain_poses(constraints, reference);

        seq = optimize(constraints, std::move(seq), params);
        if (!seq.report.converged && warnings)
            warnings->push_back("cluster " + std::to_string(k) + ": pose optimization stopped after " +
                                std::to_string(seq.report.iterations) + " iterations without converging");

        seq.inliers[reference] = static_cast<int>(ref_set->size());
        for (const auto& c : constraints) {
            if (!c.measured) continue;
            for (int f : c.frames) {
                if (f == reference || !seq.poses.contains(f)) continue;
                int& count = seq.inliers[f];
                count = std::max(count, static_cast<int>(c.weight));
            }
        }
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace kinlearn
