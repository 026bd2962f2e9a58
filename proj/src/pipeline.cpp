#include "kinlearn/pipeline.hpp"

namespace kinlearn {

LearnResult learn(const Demonstration& demo, const std::string& object, const LearnParams& params) {
    validate(params.noise);
    LearnResult r;
    r.similarity = similarity_matrix(demo, params.similarity);
    r.assignment = cluster(r.similarity, params.dbscan);
    if (r.assignment.cluster_count() < 2) return r;

    auto poses = estimate_cluster_poses(demo, r.assignment, params.posegraph, &r.warnings);
    if (poses.size() < 2) {
        r.warnings.push_back("fewer than two clusters could be posed");
        return r;
    }
    r.graph = build_graph(std::move(poses), params.noise, &r.warnings);
    r.graph->object = object;
    return r;
}

Provenance make_provenance(const LearnParams& params, const std::string& demo_file) {
    Provenance p;
    p.demo_file = demo_file;
    p.noise = params.noise;
    p.similarity = params.similarity;
    p.dbscan = params.dbscan;
    p.posegraph = params.posegraph;
    return p;
}

}  // namespace kinlearn
