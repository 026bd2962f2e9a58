#include "kinlearn/kgraph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace kinlearn {

const ClusterPoseSequence& KinematicGraph::vertex(int id) const {
    for (const auto& v : vertices)
        if (v.cluster == id) return v;
    throw Error("graph has no vertex " + std::to_string(id));
}

const GraphEdge* KinematicGraph::edge(int a, int b) const {
    const auto [i, j] = std::minmax(a, b);
    for (const auto& e : edges)
        if (e.i == i && e.j == j) return &e;
    return nullptr;
}

namespace {

struct DisjointSets {
    std::map<int, int> parent;

    int find(int x) {
        int root = x;
        while (parent.at(root) != root) root = parent.at(root);
        while (parent.at(x) != root) {
            const int next = parent.at(x);
            parent[x] = root;
            x = next;
        }
        return root;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

std::vector<std::size_t> spanning_tree(const std::vector<int>& ids, const std::vector<WeightedPair>& candidates) {
    DisjointSets sets;
    for (int id : ids) sets.parent[id] = id;
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = candidates[a];
        const auto& y = candidates[b];
        return std::tie(x.cost, x.i, x.j) < std::tie(y.cost, y.i, y.j);
    });

    std::vector<std::size_t> chosen;
    for (std::size_t k : order) {
        const auto& c = candidates[k];
        if (!sets.parent.contains(c.i) || !sets.parent.contains(c.j))
            throw Error("spanning_tree: edge references unknown vertex");
        if (sets.unite(c.i, c.j)) chosen.push_back(k);
    }
    if (!ids.empty() && chosen.size() + 1 != ids.size())
        throw DisconnectedParts("no spanning tree: " + std::to_string(ids.size()) + " parts but only " +
                                std::to_string(chosen.size() + 1) + " connected through shared frames");
    return chosen;
}

KinematicGraph build_graph(std::vector<ClusterPoseSequence> pose_seqs, const NoiseModel& noise,
                           std::vector<std::string>* warnings) {
    validate(noise);
    if (pose_seqs.empty()) throw EmptyInput("build_graph: no clusters");
    std::sort(pose_seqs.begin(), pose_seqs.end(), [](const auto& a, const auto& b) { return a.cluster < b.cluster; });

    KinematicGraph g;
    g.root = pose_seqs.front().cluster;
    if (pose_seqs.size() == 1 && warnings) warnings->push_back("single part: the graph has no joints");

    std::vector<GraphEdge> all;
    std::vector<WeightedPair> pairs;
    for (std::size_t a = 0; a < pose_seqs.size(); ++a)
        for (std::size_t b = a + 1; b < pose_seqs.size(); ++b) {
            const auto seq = relative_sequence(pose_seqs[a], pose_seqs[b]);
            if (seq.size() < 3) continue;
            auto selection = select_model(seq, noise);
            GraphEdge e;
            e.i = pose_seqs[a].cluster;
            e.j = pose_seqs[b].cluster;
            e.fit_error = model_fit_error(selection.best, seq, noise);
            e.model = std::move(selection.best);
            e.candidates = std::move(selection.candidates);
            pairs.push_back({e.model.bic, e.i, e.j});
            all.push_back(std::move(e));
        }

    std::vector<int> ids;
    for (const auto& s : pose_seqs) ids.push_back(s.cluster);
    for (std::size_t k : spanning_tree(ids, pairs)) g.edges.push_back(std::move(all[k]));
    std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    g.vertices = std::move(pose_seqs);
    return g;
}

Prediction predict(const KinematicGraph& graph, const std::map<EdgeKey, double>& configurations,
                   const Posed& base_pose) {
    Prediction out;
    out.poses[graph.root] = base_pose;
    std::deque<int> queue{graph.root};
    while (!queue.empty()) {
        const int parent = queue.front();
        queue.pop_front();
        for (const auto& e : graph.edges) {
            if (e.i != parent && e.j != parent) continue;
            const int child = e.i == parent ? e.j : e.i;
            if (out.poses.contains(child)) continue;

            double q = 0.0;
            if (e.model.kind != JointKind::Rigid) {
                const auto it = configurations.find({e.i, e.j});
                if (it == configurations.end())
                    throw MissingConfiguration("no configuration for edge (" + std::to_string(e.i) + "," +
                                               std::to_string(e.j) + ")");
                q = it->second;
                const double tol = 1e-9 * std::max(1.0, std::abs(e.model.q_max - e.model.q_min));
                if (q < e.model.q_min - tol || q > e.model.q_max + tol) out.extrapolated.push_back({e.i, e.j});
            }
            // The model gives X_j^-1 X_i.
            const Posed delta = e.model.predict(q);
            out.poses[child] = child == e.i ? out.poses.at(parent) * delta : out.poses.at(parent) * inverse(delta);
            queue.push_back(child);
        }
    }
    return out;
}

void ModelDatabase::insert(ModelEntry entry) {
    const std::string id = entry.graph.object;
    if (entries_.contains(id)) throw DuplicateObject("object '" + id + "' is already in the database");
    entries_.emplace(id, std::move(entry));
}

const ModelEntry& ModelDatabase::at(const std::string& object) const {
    const auto it = entries_.find(object);
    if (it == entries_.end()) {
        std::string known;
        for (const auto& [id, _] : entries_) known += (known.empty() ? "" : ", ") + id;
        throw UnknownObject("unknown object '" + object + "'" + (known.empty() ? "" : " (known: " + known + ")"));
    }
    return it->second;
}

namespace {

bool same_model(const JointModel& a, const JointModel& b) {
    return a.kind == b.kind && a.base == b.base && a.axis == b.axis && a.center == b.center && a.radius == b.radius &&
           a.radius_sigma == b.radius_sigma && a.frames == b.frames && a.configurations == b.configurations &&
           a.q_min == b.q_min && a.q_max == b.q_max && a.n == b.n && a.loglik == b.loglik && a.bic == b.bic &&
           a.degenerate == b.degenerate;
}

}  // namespace

bool same_graph(const KinematicGraph& a, const KinematicGraph& b) {
    if (a.object != b.object || a.root != b.root || a.vertices != b.vertices || a.edges.size() != b.edges.size())
        return false;
    for (std::size_t k = 0; k < a.edges.size(); ++k) {
        const auto& x = a.edges[k];
        const auto& y = b.edges[k];
        if (x.i != y.i || x.j != y.j || !same_model(x.model, y.model) || x.candidates.size() != y.candidates.size() ||
            x.fit_error.position != y.fit_error.position || x.fit_error.angle != y.fit_error.angle)
            return false;
        for (std::size_t c = 0; c < x.candidates.size(); ++c)
            if (!same_model(x.candidates[c], y.candidates[c])) return false;
    }
    return true;
}

EvalReport evaluate(const KinematicGraph& graph, const GroundTruth& truth) {
    EvalReport r;
    r.object = graph.object;
    std::map<int, int> part_of;  // vertex -> part
    std::set<TrajectoryId> assigned;
    double sum_t = 0.0, sum_r = 0.0;
    int frames = 0;

    for (const auto& v : graph.vertices) {
        PartReport p;
        p.vertex = v.cluster;
        p.members = static_cast<int>(v.members.size());
        std::map<int, int> votes;
        for (TrajectoryId id : v.members) {
            assigned.insert(id);
            if (auto it = truth.labels.find(id); it != truth.labels.end()) ++votes[it->second];
        }
        int best = 0;
        for (const auto& [part, count] : votes)
            if (count > best) {
                best = count;
                p.part = part;
            }
        p.mislabeled = p.members - best;
        r.mislabeled += p.mislabeled;
        part_of[v.cluster] = p.part;

        if (p.part >= 0 && v.reference_frame < truth.frame_count()) {
            const auto& gt = truth.part_poses[p.part];
            const Posed ref_inv = inverse(gt[v.reference_frame]);
            const Posed anchor = Posed::Translation(v.anchor);
            double st = 0.0, st2 = 0.0, sr = 0.0, sr2 = 0.0;
            for (const auto& [frame, x] : v.poses) {
                if (frame >= truth.frame_count()) continue;
                const auto [dt, da] = pose_distance(x * anchor, gt[frame] * ref_inv * anchor);
                const double deg = rad2deg(da);
                st += dt;
                st2 += dt * dt;
                sr += deg;
                sr2 += deg * deg;
                ++p.frames;
            }
            if (p.frames > 0) {
                p.mean_translation = st / p.frames;
                p.rmse_translation = std::sqrt(st2 / p.frames);
                p.mean_rotation = sr / p.frames;
                p.rmse_rotation = std::sqrt(sr2 / p.frames);
            }
            sum_t += st;
            sum_r += sr;
            frames += p.frames;
        }
        r.parts.push_back(p);
    }
    for (const auto& [id, _] : truth.labels)
        if (!assigned.contains(id)) ++r.unassigned;

    std::set<int> covered;
    for (const auto& [v, part] : part_of)
        if (part >= 0) covered.insert(part);
    bool bijective = covered.size() == part_of.size() && static_cast<int>(covered.size()) == truth.part_count();

    r.types_correct = true;
    bool edges_match = graph.edges.size() == truth.joints.size();
    for (const auto& e : graph.edges) {
        EdgeReport er;
        er.edge = {e.i, e.j};
        er.kind = e.model.kind;
        er.fit_error = e.fit_error;
        const int pi = part_of.at(e.i), pj = part_of.at(e.j);
        const GroundTruthJoint* joint = nullptr;
        for (const auto& gj : truth.joints)
            if ((gj.spec.parent == pi && gj.spec.child == pj) || (gj.spec.parent == pj && gj.spec.child == pi))
                joint = &gj;
        if (joint) {
            er.truth = joint->spec.type;
            er.type_correct = joint->spec.type == e.model.kind;
            if (joint->spec.type != JointKind::Rigid && e.model.kind == joint->spec.type) {
                // Ground-truth axis in j's anchored body frame.
                const auto& vj = graph.vertex(e.j);
                const Posed& Pj = truth.part_poses[pj][vj.reference_frame];
                const Vec3 dir = Pj.rotation() * joint->spec.axis;
                const double c = std::min(1.0, std::abs(dir.dot(e.model.axis)));
                er.axis_angle_error = rad2deg(std::acos(c));
                if (e.model.kind == JointKind::Revolute) {
                    const Vec3 point = Pj * joint->spec.origin - vj.anchor;
                    const Vec3 b = e.model.base.translation();
                    const Vec3 on_axis = e.model.center + (b - e.model.center).dot(e.model.axis) * e.model.axis;
                    Vec3 d = on_axis - point;
                    d -= d.dot(dir) * dir;
                    er.axis_position_error = d.norm();
                }
            }
        } else {
            edges_match = false;
        }
        r.types_correct = r.types_correct && er.type_correct;
        r.edges.push_back(er);
    }
    r.structure_correct = bijective && edges_match;
    if (frames > 0) {
        r.mean_translation = sum_t / frames;
        r.mean_rotation = sum_r / frames;
    }
    r.success = frames > 0 && r.mean_translation < 0.10 && r.mean_rotation < 25.0;
    return r;
}

}  // namespace kinlearn
