#include "kinlearn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "kinlearn/pipeline.hpp"
#include "text_util.hpp"

namespace kinlearn {
namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

using text::fmt;

/// Writes to `path`, or to `fallback` when the path is empty or "-".
void write_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(fallback);
        return;
    }
    std::ostringstream ss;
    body(ss);
    text::write_file(path, ss.str());
}

void add_learn_flags(CLI::App& cmd, LearnParams& p) {
    cmd.add_option("--gamma-pos", p.similarity.gamma_pos, "Position kernel bandwidth, 1/m^2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--gamma-normal", p.similarity.gamma_normal, "Normal kernel bandwidth")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--eps", p.dbscan.eps, "DBSCAN radius on 1 - similarity")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--min-pts", p.dbscan.min_pts, "DBSCAN neighbourhood size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--inlier-thresh", p.posegraph.inlier_threshold, "Correspondence inlier threshold, m")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--sparse-stride", p.posegraph.sparse_stride, "Frame stride of sparse pose constraints")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--sigma-pos", p.noise.sigma_pos, "Joint likelihood translation sigma, m")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--sigma-rot", p.noise.sigma_rot, "Joint likelihood rotation sigma, rad")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--seed", p.posegraph.seed, "Seed for the robust correspondence search")->capture_default_str();
}

std::string catalog_names() {
    std::string names;
    for (const auto& [name, _] : default_specs()) names += (names.empty() ? "" : ", ") + name;
    return names;
}

void write_labels(const ClusterAssignment& a, std::ostream& out) {
    out << "trajectory,cluster\n";
    for (const auto& [id, label] : a.labels) out << id << ',' << label << '\n';
}

void write_similarity(const SimilarityMatrix& m, std::ostream& out) {
    out << "id";
    for (auto id : m.ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index r = 0; r < m.size(); ++r) {
        out << m.ids[r];
        for (Eigen::Index c = 0; c < m.size(); ++c) out << ',' << (m.defined(r, c) ? fmt(m.values(r, c)) : "");
        out << '\n';
    }
}

void write_poses(const std::vector<ClusterPoseSequence>& seqs, std::ostream& out) {
    out << "cluster,frame,qw,qx,qy,qz,tx,ty,tz,inliers\n";
    for (const auto& s : seqs)
        for (const auto& [frame, _] : s.poses) {
            const Posed x = s.anchored(frame);
            const auto& q = x.rotation();
            const auto& t = x.translation();
            const auto it = s.inliers.find(frame);
            out << s.cluster << ',' << frame << ',' << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ','
                << fmt(q.z()) << ',' << fmt(t.x()) << ',' << fmt(t.y()) << ',' << fmt(t.z()) << ','
                << (it == s.inliers.end() ? 0 : it->second) << '\n';
        }
}

void print_warnings(const std::vector<std::string>& warnings, bool quiet, std::ostream& err) {
    if (quiet) return;
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string object;
    std::string spec_file;
    int frames = 900;
    std::optional<double> noise;
    std::optional<double> noise_normal;
    std::optional<double> dropout;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    ObjectSpec spec;
    if (!a.spec_file.empty()) {
        spec = object_spec_from_json(text::read_file(a.spec_file));
    } else if (!a.object.empty()) {
        const auto specs = default_specs();
        const auto it = specs.find(a.object);
        if (it == specs.end())
            throw InvalidSpec("unknown object '" + a.object + "'; the catalog has: " + catalog_names());
        spec = it->second;
    } else {
        throw InvalidSpec("generate needs --object or --spec; the catalog has: " + catalog_names());
    }
    if (a.noise) spec.noise_sigma_pos = *a.noise;
    if (a.noise_normal) spec.noise_sigma_normal = deg2rad(*a.noise_normal);
    if (a.dropout) spec.dropout_prob = *a.dropout;

    const Demonstration demo = generate(spec, a.frames, a.seed);
    save(demo, a.output);
    out << "wrote " << a.output << " (" << demo.trajectories.size() << " trajectories, " << demo.frame_count()
        << " frames) and " << ground_truth_path(a.output).string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
    std::string demo;
    std::string output;
    std::string similarity;
    std::string poses;
    bool quiet = false;
};

int cmd_segment(const SegmentArgs& a, const LearnParams& params, std::ostream& out, std::ostream& err) {
    const Demonstration demo = load(a.demo);
    const SimilarityMatrix sim = similarity_matrix(demo, params.similarity);
    const ClusterAssignment assignment = cluster(sim, params.dbscan);
    write_output(a.output, out, [&](std::ostream& o) { write_labels(assignment, o); });
    if (!a.similarity.empty()) write_output(a.similarity, out, [&](std::ostream& o) { write_similarity(sim, o); });

    int noise = 0;
    for (const auto& [_, label] : assignment.labels) noise += label == ClusterAssignment::kNoise;
    std::ostream& summary = a.output.empty() || a.output == "-" ? err : out;
    summary << assignment.cluster_count() << " clusters;";
    for (int c = 0; c < assignment.cluster_count(); ++c)
        summary << " cluster " << c << ": " << assignment.clusters[c].size() << " trajectories;";
    summary << " noise: " << noise << '\n';

    if (!a.poses.empty()) {
        std::vector<std::string> warnings;
        const auto seqs = estimate_cluster_poses(demo, assignment, params.posegraph, &warnings);
        print_warnings(warnings, a.quiet, err);
        write_output(a.poses, out, [&](std::ostream& o) { write_poses(seqs, o); });
    }
    return kExitOk;
}

// ---------------------------------------------------------------- learn

struct LearnArgs {
    std::string demo;
    std::string output;
    std::string object;
    std::string poses;
    std::string similarity;
    std::string format = "text";
    bool append = false;
    bool quiet = false;
};

int cmd_learn(const LearnArgs& a, const LearnParams& params, std::ostream& out, std::ostream& err) {
    const Demonstration demo = load(a.demo);
    std::string object = a.object;
    if (object.empty())
        object = demo.ground_truth ? demo.ground_truth->object : std::filesystem::path(a.demo).stem().string();

    LearnResult r = learn(demo, object, params);
    print_warnings(r.warnings, a.quiet, err);
    if (!a.similarity.empty()) write_output(a.similarity, out, [&](std::ostream& o) { write_similarity(r.similarity, o); });
    if (!r.graph) {
        err << "error: segmentation found " << r.assignment.cluster_count()
            << " cluster(s); a kinematic model needs at least 2 parts moving relative to each other\n";
        return kExitTooFewClusters;
    }
    const KinematicGraph& g = *r.graph;

    ModelDatabase db;
    if (a.append && std::filesystem::exists(a.output)) db = load_db(a.output);
    db.insert({g, make_provenance(params, a.demo)});
    save_db(db, a.output);

    std::filesystem::path poses = a.poses;
    if (poses.empty()) {
        poses = a.output;
        poses.replace_extension(".poses.csv");
    }
    write_output(poses.string(), out, [&](std::ostream& o) { write_poses(g.vertices, o); });

    if (a.format == "csv") {
        out << "i,j,kind,bic_rigid,bic_prismatic,bic_revolute,fit_position_m,fit_angle_deg\n";
        for (const auto& e : g.edges) {
            out << e.i << ',' << e.j << ',' << to_string(e.model.kind);
            for (const auto& c : e.candidates) out << ',' << fmt(c.bic);
            out << ',' << fmt(e.fit_error.position) << ',' << fmt(e.fit_error.angle) << '\n';
        }
        return kExitOk;
    }
    out << g.vertices.size() << " clusters";
    for (const auto& e : g.edges) {
        out << "; edge (" << e.i << ',' << e.j << "): " << to_string(e.model.kind) << "; BIC rigid/prismatic/revolute = ";
        for (std::size_t k = 0; k < e.candidates.size(); ++k) out << (k ? "/" : "") << fixed(e.candidates[k].bic, 1);
    }
    out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string db;
    std::string object;
    std::string sweep;
    std::string schedule;
    std::string output;
    bool degrees = false;
    bool quiet = false;
};

std::vector<double> parse_sweep(const std::string& s) {
    const auto parts = text::split(s, ':');
    if (parts.size() != 3) throw InvalidSpec("--sweep expects START:STOP:STEP, got '" + s + "'");
    const double start = text::parse<double>(parts[0]);
    const double stop = text::parse<double>(parts[1]);
    const double step = text::parse<double>(parts[2]);
    if (step == 0.0 || (stop - start) / step < 0.0)
        throw InvalidSpec("--sweep step must be nonzero and point from START to STOP");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 1000000) throw InvalidSpec("--sweep has more than a million steps");
    std::vector<double> values;
    for (long k = 0; k < n; ++k) values.push_back(start + static_cast<double>(k) * step);
    return values;
}

std::vector<std::map<EdgeKey, double>> parse_schedule(const std::string& content, const KinematicGraph& g) {
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    std::vector<EdgeKey> columns;
    std::vector<std::map<EdgeKey, double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, ',');
        if (columns.empty()) {
            for (auto f : fields) {
                const auto dash = f.find('-');
                if (dash == std::string_view::npos) throw ParseError("schedule header needs i-j columns", lineno);
                const int i = text::parse<int>(f.substr(0, dash), lineno);
                const int j = text::parse<int>(f.substr(dash + 1), lineno);
                if (!g.edge(i, j))
                    throw InvalidSpec("schedule names edge (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") which is not in the model");
                columns.push_back(std::minmax(i, j));
            }
            continue;
        }
        if (fields.size() != columns.size())
            throw ParseError("expected " + std::to_string(columns.size()) + " values", lineno);
        std::map<EdgeKey, double> row;
        for (std::size_t c = 0; c < columns.size(); ++c) row[columns[c]] = text::parse<double>(fields[c], lineno);
        rows.push_back(std::move(row));
    }
    if (columns.empty()) throw ParseError("schedule has no header");
    return rows;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    const ModelDatabase db = load_db(a.db);
    const KinematicGraph& g = db.at(a.object).graph;

    std::vector<EdgeKey> moving;
    for (const auto& e : g.edges)
        if (e.model.kind != JointKind::Rigid) moving.emplace_back(e.i, e.j);

    std::vector<std::map<EdgeKey, double>> schedule;
    if (!a.sweep.empty()) {
        for (double q : parse_sweep(a.sweep)) {
            std::map<EdgeKey, double> row;
            for (const auto& key : moving) row[key] = q;
            schedule.push_back(std::move(row));
        }
    } else {
        schedule = parse_schedule(text::read_file(a.schedule), g);
    }
    if (a.degrees)
        for (auto& row : schedule)
            for (auto& [key, q] : row)
                if (g.edge(key.first, key.second)->model.kind == JointKind::Revolute) q = deg2rad(q);

    int extrapolated = 0;
    write_output(a.output, out, [&](std::ostream& o) {
        o << "step";
        for (const auto& [i, j] : moving) o << ",q_" << i << '-' << j;
        for (const auto& v : g.vertices)
            for (const char* c : {"qw", "qx", "qy", "qz", "tx", "ty", "tz"}) o << ",p" << v.cluster << '_' << c;
        o << ",extrapolated\n";
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            const Prediction p = predict(g, schedule[k]);
            o << k;
            for (const auto& key : moving) {
                const auto it = schedule[k].find(key);
                o << ',' << (it == schedule[k].end() ? "" : fmt(it->second));
            }
            for (const auto& [_, x] : p.poses) {
                const auto& q = x.rotation();
                const auto& t = x.translation();
                for (double v : {q.w(), q.x(), q.y(), q.z(), t.x(), t.y(), t.z()}) o << ',' << fmt(v);
            }
            o << ',' << (p.extrapolated.empty() ? 0 : 1) << '\n';
            extrapolated += !p.extrapolated.empty();
        }
    });
    if (extrapolated && !a.quiet)
        err << "warning: " << extrapolated << " of " << schedule.size()
            << " rows lie outside the observed configuration range\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::vector<std::string> demos;
    std::string db;
    std::string object;
    std::string output;
    std::string format = "text";
    bool quiet = false;
};

struct EvalRow {
    std::string demo;
    std::string object;
    std::optional<EvalReport> report;
    std::string failure;  // why no model exists
};

const KinematicGraph& find_model(const ModelDatabase& db, const std::string& object, const std::string& demo_path) {
    if (!object.empty()) return db.at(object).graph;
    for (const auto& [_, entry] : db.entries())
        if (entry.provenance.demo_file == demo_path) return entry.graph;
    const auto name = std::filesystem::path(demo_path).filename();
    for (const auto& [_, entry] : db.entries())
        if (std::filesystem::path(entry.provenance.demo_file).filename() == name) return entry.graph;
    throw UnknownObject("no model in the database was learned from " + demo_path +
                        "; pass --object to choose one");
}

void write_eval_csv(const std::vector<EvalRow>& rows, std::ostream& o) {
    o << "demo,object,parts,mislabeled,unassigned,structure_correct,types_correct,mean_translation_m,"
         "mean_rotation_deg,success,edge,kind,truth,type_correct,axis_angle_deg,axis_position_m,fit_position_m,"
         "fit_angle_deg\n";
    const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& row : rows) {
        if (!row.report) {
            o << row.demo << ',' << row.object << ",0,,,0,0,,,0,,,,,,,,\n";
            continue;
        }
        const auto& r = *row.report;
        std::ostringstream head;
        head << row.demo << ',' << row.object << ',' << r.parts.size() << ',' << r.mislabeled << ',' << r.unassigned
             << ',' << r.structure_correct << ',' << r.types_correct << ',' << fmt(r.mean_translation) << ','
             << fmt(r.mean_rotation) << ',' << r.success;
        if (r.edges.empty()) o << head.str() << ",,,,,,,,\n";
        for (const auto& e : r.edges)
            o << head.str() << ',' << e.edge.first << '-' << e.edge.second << ',' << to_string(e.kind) << ','
              << (e.truth ? std::string(to_string(*e.truth)) : "") << ',' << e.type_correct << ','
              << opt(e.axis_angle_error) << ',' << opt(e.axis_position_error) << ',' << fmt(e.fit_error.position)
              << ',' << fmt(e.fit_error.angle) << '\n';
    }
}

void write_eval_text(const std::vector<EvalRow>& rows, std::ostream& o) {
    std::map<std::string, std::pair<int, int>> tally;  // object -> (successes, runs)
    for (const auto& row : rows) {
        auto& [ok, runs] = tally[row.object];
        ++runs;
        if (!row.report) {
            o << row.demo << ": " << row.object << " no model (" << row.failure << ")\n";
            continue;
        }
        const auto& r = *row.report;
        ok += r.success;
        o << row.demo << ": " << row.object << " parts " << r.parts.size() << " mislabeled " << r.mislabeled
          << " unassigned " << r.unassigned << " structure " << (r.structure_correct ? "ok" : "wrong") << " types "
          << (r.types_correct ? "ok" : "wrong") << " error " << fixed(100.0 * r.mean_translation, 2) << " cm "
          << fixed(r.mean_rotation, 2) << " deg " << (r.success ? "success" : "failure") << '\n';
        for (const auto& e : r.edges) {
            o << "  edge (" << e.edge.first << ',' << e.edge.second << ") " << to_string(e.kind) << " truth "
              << (e.truth ? std::string(to_string(*e.truth)) : "none");
            if (e.axis_angle_error) o << " axis " << fixed(*e.axis_angle_error, 2) << " deg";
            if (e.axis_position_error) o << " position " << fixed(100.0 * *e.axis_position_error, 2) << " cm";
            o << " fit " << fixed(100.0 * e.fit_error.position, 2) << " cm " << fixed(e.fit_error.angle, 2) << " deg\n";
        }
    }
    for (const auto& [object, t] : tally) o << object << ": " << t.first << '/' << t.second << '\n';
}

int cmd_eval(const EvalArgs& a, const LearnParams& params, std::ostream& out, std::ostream& err) {
    std::optional<ModelDatabase> db;
    if (!a.db.empty()) db = load_db(a.db);
    if (!a.object.empty() && !db) throw InvalidSpec("--object needs --db");

    std::vector<EvalRow> rows;
    for (const auto& path : a.demos) {
        const Demonstration demo = load(path);
        if (!demo.ground_truth)
            throw MissingGroundTruth(path + " has no ground-truth sidecar " + ground_truth_path(path).string());
        const GroundTruth& gt = *demo.ground_truth;
        EvalRow row{path, gt.object, std::nullopt, {}};
        if (db) {
            row.report = evaluate(find_model(*db, a.object, path), gt);
        } else {
            try {
                LearnResult r = learn(demo, gt.object, params);
                print_warnings(r.warnings, a.quiet, err);
                if (r.graph)
                    row.report = evaluate(*r.graph, gt);
                else
                    row.failure = std::to_string(r.assignment.cluster_count()) + " cluster(s)";
            } catch (const DisconnectedParts& e) {
                row.failure = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    write_output(a.output, out, [&](std::ostream& o) {
        if (a.format == "csv")
            write_eval_csv(rows, o);
        else
            write_eval_text(rows, o);
    });
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learn kinematic models of articulated objects from feature trajectories", "kinlearn"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Synthesize a demonstration with ground truth");
    auto* g_object = g->add_option("--object", gen.object, "Catalog object (" + catalog_names() + ")");
    g->add_option("--spec", gen.spec_file, "Object spec JSON file")->excludes(g_object);
    g->add_option("--frames", gen.frames, "Number of frames")->capture_default_str();
    g->add_option("--noise", gen.noise, "Position noise, RMS meters (default: the spec's)");
    g->add_option("--noise-normal", gen.noise_normal, "Normal noise, degrees (default: the spec's)");
    g->add_option("--dropout", gen.dropout, "Per-observation dropout probability (default: the spec's)");
    g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    g->add_option("-o,--output", gen.output, "Trajectory file; ground truth goes next to it with extension .gt")->required();

    LearnParams seg_params;
    SegmentArgs seg;
    auto* s = app.add_subcommand("segment", "Cluster trajectories into rigid parts");
    s->add_option("demo", seg.demo, "Trajectory file")->required();
    s->add_option("-o,--output", seg.output, "Labels CSV (default: stdout)");
    s->add_option("--dump-similarity", seg.similarity, "Also write the similarity matrix as CSV");
    s->add_option("--poses", seg.poses, "Also estimate and write per-cluster poses as CSV");
    add_learn_flags(*s, seg_params);

    LearnParams learn_params;
    LearnArgs lrn;
    auto* l = app.add_subcommand("learn", "Learn a kinematic model and store it in a model database");
    l->add_option("demo", lrn.demo, "Trajectory file")->required();
    l->add_option("-o,--output", lrn.output, "Model database (JSON)")->required();
    l->add_option("--object", lrn.object, "Object id (default: ground-truth name or file stem)");
    l->add_flag("--append", lrn.append, "Add to an existing database instead of replacing it");
    l->add_option("--poses", lrn.poses, "Per-cluster pose CSV (default: the database path with extension .poses.csv)");
    l->add_option("--dump-similarity", lrn.similarity, "Also write the similarity matrix as CSV");
    l->add_option("--format", lrn.format, "Summary format")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    add_learn_flags(*l, learn_params);

    PredictArgs pred;
    auto* p = app.add_subcommand("predict", "Predict part poses over a configuration schedule");
    p->add_option("db", pred.db, "Model database")->required();
    p->add_option("--object", pred.object, "Object id")->required();
    auto* p_sweep = p->add_option("--sweep", pred.sweep, "START:STOP:STEP applied to every non-rigid edge");
    auto* p_schedule = p->add_option("--schedule", pred.schedule, "CSV with one i-j column per edge");
    p_sweep->excludes(p_schedule);
    p->add_flag("--deg", pred.degrees, "Revolute values are in degrees");
    p->add_option("-o,--output", pred.output, "Pose CSV (default: stdout)");

    LearnParams eval_params;
    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Score learned models against ground truth");
    e->add_option("demos", ev.demos, "Trajectory files with .gt sidecars")->required();
    e->add_option("--db", ev.db, "Model database (default: learn each demo with the flags below)");
    e->add_option("--object", ev.object, "Model to score (with --db)");
    e->add_option("--format", ev.format, "Report format")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    e->add_option("-o,--output", ev.output, "Report file (default: stdout)");
    add_learn_flags(*e, eval_params);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (p->parsed() && pred.sweep.empty() && pred.schedule.empty()) {
        err << "error: predict needs --sweep or --schedule\n";
        return kExitUsage;
    }

    try {
        if (g->parsed()) return cmd_generate(gen, out);
        if (s->parsed()) {
            seg.quiet = quiet;
            return cmd_segment(seg, seg_params, out, err);
        }
        if (l->parsed()) {
            lrn.quiet = quiet;
            return cmd_learn(lrn, learn_params, out, err);
        }
        if (p->parsed()) {
            pred.quiet = quiet;
            return cmd_predict(pred, out, err);
        }
        ev.quiet = quiet;
        return cmd_eval(ev, eval_params, out, err);
    } catch (const DisconnectedParts& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitDisconnected;
    } catch (const UnknownObject& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUnknownObject;
    } catch (const DuplicateObject& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitDuplicateObject;
    } catch (const InvalidSpec& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const MissingConfiguration& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const MissingGroundTruth& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const EmptyInput& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitTooFewClusters;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitIo;
    }
}

}  // namespace kinlearn
