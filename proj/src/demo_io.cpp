#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "kinlearn/demo.hpp"
#include "text_util.hpp"

namespace kinlearn {

using jsonio::json;

// .traj layout:
//   KINTRAJ <schema> <frame_rate>
//   <id> <frame> <px> <py> <pz> <nx> <ny> <nz>      one line per observation
//   END <observation count>
// Trajectories appear as contiguous blocks; '#' starts a comment line.

void write_trajectories(const Demonstration& demo, std::ostream& out) {
    std::size_t count = 0;
    out << "KINTRAJ " << kTrajSchemaVersion << ' ' << text::fmt(demo.frame_rate) << '\n';
    out << "# id frame px py pz nx ny nz\n";
    for (const auto& t : demo.trajectories)
        for (const auto& o : t.observations) {
            out << t.id << ' ' << o.frame;
            for (int k = 0; k < 3; ++k) out << ' ' << text::fmt(o.position[k]);
            for (int k = 0; k < 3; ++k) out << ' ' << text::fmt(o.normal[k]);
            out << '\n';
            ++count;
        }
    out << "END " << count << '\n';
}

Demonstration read_trajectories(std::istream& in) {
    Demonstration demo;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false, have_end = false;
    std::size_t records = 0;
    std::set<TrajectoryId> finished;

    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = text::split(line);
        if (fields.empty() || fields[0].starts_with('#')) continue;
        if (have_end) throw ParseError("content after END record", lineno);

        if (!have_header) {
            if (fields.size() != 3 || fields[0] != "KINTRAJ") throw ParseError("expected 'KINTRAJ <schema> <rate>' header", lineno);
            const int version = text::parse<int>(fields[1], lineno);
            if (version != kTrajSchemaVersion) throw SchemaVersionMismatch(version, kTrajSchemaVersion);
            demo.frame_rate = text::parse<double>(fields[2], lineno);
            have_header = true;
            continue;
        }
        if (fields[0] == "END") {
            if (fields.size() != 2) throw ParseError("malformed END record", lineno);
            if (text::parse<std::size_t>(fields[1], lineno) != records)
                throw ParseError("END record count does not match the observations read", lineno);
            have_end = true;
            continue;
        }
        if (fields.size() != 8)
            throw ParseError("expected 8 fields (id frame px py pz nx ny nz), got " + std::to_string(fields.size()),
                             lineno);

        const auto id = text::parse<TrajectoryId>(fields[0], lineno);
        FeatureObservation obs;
        obs.frame = text::parse<int>(fields[1], lineno);
        for (int k = 0; k < 3; ++k) obs.position[k] = text::parse<double>(fields[2 + k], lineno);
        for (int k = 0; k < 3; ++k) obs.normal[k] = text::parse<double>(fields[5 + k], lineno);
        if (std::abs(obs.normal.norm() - 1.0) > 1e-6) throw ParseError("normal is not unit length", lineno);

        if (demo.trajectories.empty() || demo.trajectories.back().id != id) {
            if (!demo.trajectories.empty()) finished.insert(demo.trajectories.back().id);
            if (finished.contains(id)) throw ParseError("duplicate id " + std::to_string(id), lineno);
            demo.trajectories.push_back({id, {}});
        }
        auto& traj = demo.trajectories.back();
        if (!traj.observations.empty() && obs.frame <= traj.observations.back().frame)
            throw ParseError("frames must be strictly increasing within trajectory " + std::to_string(id), lineno);
        if (obs.frame < 0) throw ParseError("negative frame index", lineno);
        traj.observations.push_back(obs);
        ++records;
    }
    if (!have_header) throw ParseError("missing KINTRAJ header", lineno + 1);
    if (!have_end) throw ParseError("missing END record (truncated file?)", lineno + 1);
    for (const auto& t : demo.trajectories)
        if (t.observations.size() < 2)
            throw ParseError("trajectory " + std::to_string(t.id) + " has fewer than 2 observations");
    return demo;
}

std::filesystem::path ground_truth_path(const std::filesystem::path& traj_path) {
    auto p = traj_path;
    p.replace_extension(".gt");
    return p;
}

namespace {

json profile_to_json(const MotionProfile& p) {
    return {{"kind", std::string(to_string(p.kind))},
            {"from", p.from},
            {"to", p.to},
            {"cycles", p.cycles},
            {"hold_fraction", p.hold_fraction}};
}

MotionProfile profile_from_json(const json& j) {
    MotionProfile p;
    const auto kind = parse_profile_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown motion profile '" + j.at("kind").get<std::string>() + "'");
    p.kind = *kind;
    p.from = j.at("from").get<double>();
    p.to = j.at("to").get<double>();
    p.cycles = j.value("cycles", 1.0);
    p.hold_fraction = j.value("hold_fraction", 0.3);
    return p;
}

json joint_to_json(const JointSpec& s) {
    return {{"parent", s.parent},
            {"child", s.child},
            {"type", std::string(to_string(s.type))},
            {"axis", jsonio::to_json(s.axis)},
            {"origin", jsonio::to_json(s.origin)},
            {"profile", profile_to_json(s.profile)}};
}

JointSpec joint_from_json(const json& j) {
    JointSpec s;
    s.parent = j.at("parent").get<int>();
    s.child = j.at("child").get<int>();
    const auto kind = parse_joint_kind(j.at("type").get<std::string>());
    if (!kind) throw ParseError("unknown joint type '" + j.at("type").get<std::string>() + "'");
    s.type = *kind;
    s.axis = jsonio::vec3(j.at("axis"));
    s.origin = jsonio::vec3(j.value("origin", json::array({0.0, 0.0, 0.0})));
    s.profile = profile_from_json(j.at("profile"));
    return s;
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

}  // namespace

std::string ground_truth_to_json(const GroundTruth& gt) {
    json j;
    j["schema"] = kGroundTruthSchemaVersion;
    j["object"] = gt.object;
    json labels = json::array();
    for (const auto& [id, part] : gt.labels) labels.push_back({id, part});
    j["labels"] = std::move(labels);
    json parts = json::array();
    for (const auto& poses : gt.part_poses) {
        json seq = json::array();
        for (const auto& p : poses) seq.push_back(jsonio::to_json(p));
        parts.push_back(std::move(seq));
    }
    j["part_poses"] = std::move(parts);
    json joints = json::array();
    for (const auto& gj : gt.joints) {
        json e = joint_to_json(gj.spec);
        e["configurations"] = gj.configurations;
        joints.push_back(std::move(e));
    }
    j["joints"] = std::move(joints);
    return j.dump() + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
    const json j = jsonio::parse(text);
    return guarded([&] {
        const int version = j.at("schema").get<int>();
        if (version != kGroundTruthSchemaVersion) throw SchemaVersionMismatch(version, kGroundTruthSchemaVersion);
        GroundTruth gt;
        gt.object = j.at("object").get<std::string>();
        for (const auto& l : j.at("labels")) gt.labels[l.at(0).get<TrajectoryId>()] = l.at(1).get<int>();
        for (const auto& seq : j.at("part_poses")) {
            std::vector<Posed> poses;
            poses.reserve(seq.size());
            for (const auto& p : seq) poses.push_back(jsonio::pose(p));
            gt.part_poses.push_back(std::move(poses));
        }
        for (const auto& e : j.at("joints"))
            gt.joints.push_back({joint_from_json(e), e.at("configurations").get<std::vector<double>>()});
        for (const auto& [id, part] : gt.labels)
            if (part < 0 || part >= gt.part_count())
                throw ParseError("label of trajectory " + std::to_string(id) + " references missing part");
        return gt;
    });
}

std::string object_spec_to_json(const ObjectSpec& spec) {
    json j;
    j["name"] = spec.name;
    json parts = json::array();
    for (const auto& part : spec.parts) {
        json faces = json::array();
        for (const auto& f : part.faces)
            faces.push_back({{"origin", jsonio::to_json(f.origin)},
                             {"edge_u", jsonio::to_json(f.edge_u)},
                             {"edge_v", jsonio::to_json(f.edge_v)}});
        parts.push_back({{"name", part.name}, {"faces", std::move(faces)}});
    }
    j["parts"] = std::move(parts);
    json joints = json::array();
    for (const auto& s : spec.joints) joints.push_back(joint_to_json(s));
    j["joints"] = std::move(joints);
    j["placement"] = jsonio::to_json(spec.placement);
    j["features_per_part"] = spec.features_per_part;
    j["noise_sigma_pos"] = spec.noise_sigma_pos;
    j["noise_sigma_normal"] = spec.noise_sigma_normal;
    j["dropout_prob"] = spec.dropout_prob;
    j["track_lifetime"] = spec.track_lifetime;
    j["frame_rate"] = spec.frame_rate;
    return j.dump(2) + "\n";
}

ObjectSpec object_spec_from_json(const std::string& text) {
    const json j = jsonio::parse(text);
    return guarded([&] {
        ObjectSpec spec;
        spec.name = j.value("name", std::string("object"));
        for (const auto& p : j.at("parts")) {
            PartSpec part;
            part.name = p.value("name", std::string());
            for (const auto& f : p.at("faces"))
                part.faces.push_back({jsonio::vec3(f.at("origin")), jsonio::vec3(f.at("edge_u")),
                                      jsonio::vec3(f.at("edge_v"))});
            spec.parts.push_back(std::move(part));
        }
        for (const auto& s : j.value("joints", json::array())) spec.joints.push_back(joint_from_json(s));
        if (j.contains("placement")) spec.placement = jsonio::pose(j.at("placement"));
        spec.features_per_part = j.value("features_per_part", spec.features_per_part);
        spec.noise_sigma_pos = j.value("noise_sigma_pos", spec.noise_sigma_pos);
        spec.noise_sigma_normal = j.value("noise_sigma_normal", spec.noise_sigma_normal);
        spec.dropout_prob = j.value("dropout_prob", spec.dropout_prob);
        spec.track_lifetime = j.value("track_lifetime", spec.track_lifetime);
        spec.frame_rate = j.value("frame_rate", spec.frame_rate);
        return spec;
    });
}

void save(const Demonstration& demo, const std::filesystem::path& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        write_trajectories(demo, out);
        if (!out) throw Error("write failed: " + path.string());
    }
    if (demo.ground_truth) text::write_file(ground_truth_path(path), ground_truth_to_json(*demo.ground_truth));
}

Demonstration load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    Demonstration demo = read_trajectories(in);
    const auto gt_path = ground_truth_path(path);
    if (std::filesystem::exists(gt_path)) {
        demo.ground_truth = ground_truth_from_json(text::read_file(gt_path));
        for (const auto& t : demo.trajectories)
            if (!demo.ground_truth->labels.contains(t.id))
                throw ParseError("ground truth has no label for trajectory " + std::to_string(t.id));
    }
    return demo;
}

}  // namespace kinlearn
