#include "json_util.hpp"
#include "kinlearn/kgraph.hpp"
#include "text_util.hpp"

namespace kinlearn {

using jsonio::json;

namespace {

json model_to_json(const JointModel& m) {
    return {{"kind", std::string(to_string(m.kind))},
            {"p", m.parameter_count()},
            {"base", jsonio::to_json(m.base)},
            {"axis", jsonio::to_json(m.axis)},
            {"center", jsonio::to_json(m.center)},
            {"radius", m.radius},
            {"radius_sigma", m.radius_sigma},
            {"q_range", {m.q_min, m.q_max}},
            {"n", m.n},
            {"loglik", m.loglik},
            {"bic", m.bic},
            {"degenerate", m.degenerate},
            {"frames", m.frames},
            {"configurations", m.configurations}};
}

JointModel model_from_json(const json& j) {
    JointModel m;
    const auto kind = parse_joint_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown joint kind '" + j.at("kind").get<std::string>() + "'");
    m.kind = *kind;
    if (j.at("p").get<int>() != m.parameter_count())
        throw ParseError("parameter count does not match joint kind " + std::string(to_string(m.kind)));
    m.base = jsonio::pose(j.at("base"));
    m.axis = jsonio::vec3(j.at("axis"));
    m.center = jsonio::vec3(j.at("center"));
    m.radius = j.at("radius").get<double>();
    m.radius_sigma = j.at("radius_sigma").get<double>();
    m.q_min = j.at("q_range").at(0).get<double>();
    m.q_max = j.at("q_range").at(1).get<double>();
    m.n = j.at("n").get<int>();
    m.loglik = j.at("loglik").get<double>();
    m.bic = j.at("bic").get<double>();
    m.degenerate = j.at("degenerate").get<bool>();
    m.frames = j.at("frames").get<std::vector<int>>();
    m.configurations = j.at("configurations").get<std::vector<double>>();
    if (!m.configurations.empty() && m.configurations.size() != m.frames.size())
        throw ParseError("configurations and frames differ in length");
    return m;
}

json vertex_to_json(const ClusterPoseSequence& v) {
    json frames = json::array(), poses = json::array(), inliers = json::array();
    for (const auto& [f, p] : v.poses) {
        frames.push_back(f);
        poses.push_back(jsonio::to_json(p));
    }
    for (const auto& [f, n] : v.inliers) inliers.push_back({f, n});
    return {{"id", v.cluster},
            {"members", v.members},
            {"anchor", jsonio::to_json(v.anchor)},
            {"reference_frame", v.reference_frame},
            {"frames", std::move(frames)},
            {"poses", std::move(poses)},
            {"inliers", std::move(inliers)},
            {"optimizer",
             {{"iterations", v.report.iterations},
              {"converged", v.report.converged},
              {"initial_cost", v.report.initial_cost},
              {"final_cost", v.report.final_cost}}}};
}

ClusterPoseSequence vertex_from_json(const json& j) {
    ClusterPoseSequence v;
    v.cluster = j.at("id").get<int>();
    v.members = j.at("members").get<std::vector<TrajectoryId>>();
    v.anchor = jsonio::vec3(j.at("anchor"));
    v.reference_frame = j.at("reference_frame").get<int>();
    const auto& frames = j.at("frames");
    const auto& poses = j.at("poses");
    if (frames.size() != poses.size()) throw ParseError("vertex " + std::to_string(v.cluster) + ": frames/poses mismatch");
    for (std::size_t k = 0; k < frames.size(); ++k) v.poses[frames[k].get<int>()] = jsonio::pose(poses[k]);
    for (const auto& e : j.at("inliers")) v.inliers[e.at(0).get<int>()] = e.at(1).get<int>();
    const auto& opt = j.at("optimizer");
    v.report.iterations = opt.at("iterations").get<int>();
    v.report.converged = opt.at("converged").get<bool>();
    v.report.initial_cost = opt.at("initial_cost").get<double>();
    v.report.final_cost = opt.at("final_cost").get<double>();
    return v;
}

json provenance_to_json(const Provenance& p) {
    return {{"demo_file", p.demo_file},
            {"date", p.date},
            {"noise", {{"sigma_pos", p.noise.sigma_pos}, {"sigma_rot", p.noise.sigma_rot}}},
            {"similarity",
             {{"gamma_pos", p.similarity.gamma_pos},
              {"gamma_normal", p.similarity.gamma_normal},
              {"min_overlap", p.similarity.min_overlap},
              {"combine", static_cast<int>(p.similarity.combine)}}},
            {"dbscan", {{"eps", p.dbscan.eps}, {"min_pts", p.dbscan.min_pts}}},
            {"posegraph",
             {{"inlier_threshold", p.posegraph.inlier_threshold},
              {"sparse_stride", p.posegraph.sparse_stride},
              {"velocity_weight_factor", p.posegraph.velocity_weight_factor},
              {"max_iterations", p.posegraph.max_iterations},
              {"relative_tolerance", p.posegraph.relative_tolerance},
              {"seed", p.posegraph.seed}}}};
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.demo_file = j.at("demo_file").get<std::string>();
    p.date = j.at("date").get<std::string>();
    p.noise.sigma_pos = j.at("noise").at("sigma_pos").get<double>();
    p.noise.sigma_rot = j.at("noise").at("sigma_rot").get<double>();
    const auto& s = j.at("similarity");
    p.similarity.gamma_pos = s.at("gamma_pos").get<double>();
    p.similarity.gamma_normal = s.at("gamma_normal").get<double>();
    p.similarity.min_overlap = s.at("min_overlap").get<int>();
    p.similarity.combine = static_cast<CombineRule>(s.at("combine").get<int>());
    p.dbscan.eps = j.at("dbscan").at("eps").get<double>();
    p.dbscan.min_pts = j.at("dbscan").at("min_pts").get<int>();
    const auto& g = j.at("posegraph");
    p.posegraph.inlier_threshold = g.at("inlier_threshold").get<double>();
    p.posegraph.sparse_stride = g.at("sparse_stride").get<int>();
    p.posegraph.velocity_weight_factor = g.at("velocity_weight_factor").get<double>();
    p.posegraph.max_iterations = g.at("max_iterations").get<int>();
    p.posegraph.relative_tolerance = g.at("relative_tolerance").get<double>();
    p.posegraph.seed = g.at("seed").get<std::uint64_t>();
    return p;
}

void check_tree(const KinematicGraph& g) {
    const std::size_t k = g.vertices.size();
    if (k == 0) throw ParseError("object '" + g.object + "' has no vertices");
    if (g.edges.size() + 1 != k)
        throw ParseError("object '" + g.object + "': " + std::to_string(g.edges.size()) + " edges for " +
                         std::to_string(k) + " vertices is not a tree");
    std::vector<int> ids;
    for (const auto& v : g.vertices) ids.push_back(v.cluster);
    std::vector<WeightedPair> pairs;
    for (const auto& e : g.edges) {
        if (e.i >= e.j) throw ParseError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") not ordered");
        pairs.push_back({0.0, e.i, e.j});
    }
    try {
        if (spanning_tree(ids, pairs).size() != g.edges.size())
            throw ParseError("object '" + g.object + "': edges contain a cycle");
    } catch (const DisconnectedParts&) {
        throw ParseError("object '" + g.object + "': edges do not connect every vertex");
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError("object '" + g.object + "': " + e.what());
    }
}

}  // namespace

std::string database_to_json(const ModelDatabase& db) {
    json objects = json::array();
    for (const auto& [id, entry] : db.entries()) {
        const auto& g = entry.graph;
        json vertices = json::array(), edges = json::array();
        for (const auto& v : g.vertices) vertices.push_back(vertex_to_json(v));
        for (const auto& e : g.edges) {
            json candidates = json::array();
            for (const auto& c : e.candidates) candidates.push_back(model_to_json(c));
            edges.push_back({{"i", e.i},
                             {"j", e.j},
                             {"model", model_to_json(e.model)},
                             {"candidates", std::move(candidates)},
                             {"fit_error", {{"position", e.fit_error.position}, {"angle_deg", e.fit_error.angle}}}});
        }
        objects.push_back({{"object", id},
                           {"provenance", provenance_to_json(entry.provenance)},
                           {"appearance", nullptr},
                           {"root", g.root},
                           {"vertices", std::move(vertices)},
                           {"edges", std::move(edges)}});
    }
    json j;
    j["schema"] = kDatabaseSchemaVersion;
    j["objects"] = std::move(objects);
    return j.dump(1) + "\n";
}

ModelDatabase database_from_json(const std::string& text) {
    const json j = jsonio::parse(text);
    ModelDatabase db;
    try {
        const int version = j.at("schema").get<int>();
        if (version != kDatabaseSchemaVersion) throw SchemaVersionMismatch(version, kDatabaseSchemaVersion);
        for (const auto& o : j.at("objects")) {
            ModelEntry entry;
            entry.graph.object = o.at("object").get<std::string>();
            entry.provenance = provenance_from_json(o.at("provenance"));
            entry.graph.root = o.at("root").get<int>();
            for (const auto& v : o.at("vertices")) entry.graph.vertices.push_back(vertex_from_json(v));
            for (const auto& e : o.at("edges")) {
                GraphEdge edge;
                edge.i = e.at("i").get<int>();
                edge.j = e.at("j").get<int>();
                edge.model = model_from_json(e.at("model"));
                for (const auto& c : e.at("candidates")) edge.candidates.push_back(model_from_json(c));
                edge.fit_error.position = e.at("fit_error").at("position").get<double>();
                edge.fit_error.angle = e.at("fit_error").at("angle_deg").get<double>();
                entry.graph.edges.push_back(std::move(edge));
            }
            check_tree(entry.graph);
            db.insert(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    return db;
}

void save_db(const ModelDatabase& db, const std::filesystem::path& path) {
    text::write_file(path, database_to_json(db));
}

ModelDatabase load_db(const std::filesystem::path& path) { return database_from_json(text::read_file(path)); }

}  // namespace kinlearn
