#include "kinlearn/joints.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace kinlearn {

RelativePoseSequence relative_sequence(const ClusterPoseSequence& i, const ClusterPoseSequence& j) {
    RelativePoseSequence seq;
    seq.part_i = i.cluster;
    seq.part_j = j.cluster;
    for (const auto& [frame, _] : i.poses) {
        if (!j.poses.contains(frame)) continue;
        seq.frames.push_back(frame);
        seq.deltas.push_back(relative(i.anchored(frame), j.anchored(frame)));
    }
    return seq;
}

void validate(const NoiseModel& noise) {
    if (!(noise.sigma_pos > 0.0) || !(noise.sigma_rot > 0.0))
        throw InvalidSpec("noise model sigmas must be positive");
}

double log_normal(double x, double sigma) {
    return -0.5 * std::log(2.0 * kPi * sigma * sigma) - x * x / (2.0 * sigma * sigma);
}

int parameter_count(JointKind kind) {
    switch (kind) {
        case JointKind::Rigid: return 6;
        case JointKind::Prismatic: return 8;
        case JointKind::Revolute: return 9;
    }
    return 0;
}

int JointModel::parameter_count() const { return kinlearn::parameter_count(kind); }

Posed JointModel::predict(double q) const {
    switch (kind) {
        case JointKind::Rigid: return base;
        case JointKind::Prismatic: return Posed::Translation(q * axis) * base;
        case JointKind::Revolute: return rotation_about_line(center, axis, q) * base;
    }
    return base;
}

double bic(double loglik, int parameters, int n) {
    return -2.0 * loglik + parameters * std::log(static_cast<double>(n));
}

double loglik(const JointModel& model, const RelativePoseSequence& seq, const NoiseModel& noise) {
    validate(noise);
    double sum = 0.0;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const double q = model.configurations.empty() ? 0.0 : model.configurations.at(t);
        const auto [dt, da] = pose_distance(seq.deltas[t], model.predict(q));
        sum += log_normal(dt, noise.sigma_pos) + log_normal(da, noise.sigma_rot);
    }
    return sum;
}

namespace {

void require(const RelativePoseSequence& seq, std::size_t n, const char* what) {
    if (seq.size() < n)
        throw EmptyInput(std::string(what) + " needs at least " + std::to_string(n) + " observations, got " +
                         std::to_string(seq.size()));
}

void finish(JointModel& m, const RelativePoseSequence& seq, const NoiseModel& noise) {
    m.frames = seq.frames;
    m.n = static_cast<int>(seq.size());
    if (!m.configurations.empty()) {
        const auto [lo, hi] = std::minmax_element(m.configurations.begin(), m.configurations.end());
        m.q_min = *lo;
        m.q_max = *hi;
    }
    m.loglik = loglik(m, seq, noise);
    m.bic = bic(m.loglik, m.parameter_count(), m.n);
}

std::vector<Quat> rotations(const RelativePoseSequence& seq) {
    std::vector<Quat> out;
    out.reserve(seq.size());
    for (const auto& d : seq.deltas) out.push_back(d.rotation());
    return out;
}

Vec3 mean_translation(const std::vector<Vec3>& ts) {
    Vec3 m = Vec3::Zero();
    for (const auto& t : ts) m += t;
    return m / static_cast<double>(ts.size());
}

// Dominant eigenvector of sum v v^T, sign chosen so sum v.e >= 0.
Vec3 principal_direction(const std::vector<Vec3>& vs) {
    Mat3 S = Mat3::Zero();
    Vec3 sum = Vec3::Zero();
    for (const auto& v : vs) {
        S.noalias() += v * v.transpose();
        sum += v;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(S);
    Vec3 e = eig.eigenvalues()(2) > 0.0 ? Vec3(eig.eigenvectors().col(2)) : Vec3::UnitZ();
    if (sum.dot(e) < 0.0) e = -e;
    return e.normalized();
}

// Twist angle of q about the unit axis a (swing-twist decomposition).
double twist_angle(const Quat& q, const Vec3& a) { return 2.0 * std::atan2(q.vec().dot(a), q.w()); }

double wrap(double angle) { return std::remainder(angle, 2.0 * kPi); }

struct Circle {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    double radius_sigma = 0.0;
    bool ok = false;
};

// Algebraic (Kasa) fit on centred data, then one Gauss-Newton step on the
// geometric residuals |p - c| - r.
Circle fit_circle(const std::vector<Eigen::Vector2d>& pts) {
    Circle c;
    const std::size_t n = pts.size();
    if (n < 3) return c;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(n);

    // x^2 + y^2 + D x + E y + F = 0
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, (pts[k] - mean).norm());
    if (scale <= 0.0) return c;
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d p = (pts[k] - mean) / scale;
        A.row(k) << p.x(), p.y(), 1.0;
        b(k) = -p.squaredNorm();
    }
    const Eigen::Matrix3d AtA = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> spec(AtA);
    if (spec.eigenvalues()(0) <= 1e-12 * spec.eigenvalues()(2)) return c;
    const Eigen::Vector3d s = AtA.ldlt().solve(A.transpose() * b);
    Eigen::Vector2d center(-s(0) / 2.0, -s(1) / 2.0);
    const double r2 = center.squaredNorm() - s(2);
    if (!(r2 > 0.0)) return c;
    double r = std::sqrt(r2);
    center = center * scale + mean;
    r *= scale;

    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd res(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d d = pts[k] - center;
        const double len = d.norm();
        if (len <= 0.0) return c;
        res(k) = len - r;
        J.row(k) << -d.x() / len, -d.y() / len, -1.0;
    }
    const Eigen::Matrix3d JtJ = J.transpose() * J;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(JtJ);
    if (lu.rank() == 3) {
        const Eigen::Vector3d step = lu.solve(-J.transpose() * res);
        center += step.head<2>();
        r += step(2);
        double ss = 0.0;
        for (std::size_t k = 0; k < n; ++k) ss += std::pow((pts[k] - center).norm() - r, 2);
        const double var = n > 3 ? ss / static_cast<double>(n - 3) : 0.0;
        c.radius_sigma = std::sqrt(std::max(0.0, var * lu.inverse()(2, 2)));
    }
    c.center = center;
    c.radius = std::abs(r);
    c.ok = std::isfinite(c.radius) && center.allFinite();
    return c;
}

}  // namespace

JointModel fit_rigid(const RelativePoseSequence& seq, const NoiseModel& noise) {
    require(seq, 1, "fit_rigid");
    JointModel m;
    m.kind = JointKind::Rigid;
    std::vector<Vec3> ts;
    for (const auto& d : seq.deltas) ts.push_back(d.translation());
    m.base = Posed(mean_rotation(rotations(seq)), mean_translation(ts));
    finish(m, seq, noise);
    return m;
}

JointModel fit_prismatic(const RelativePoseSequence& seq, const NoiseModel& noise) {
    require(seq, 3, "fit_prismatic");
    JointModel m;
    m.kind = JointKind::Prismatic;
    std::vector<Vec3> ts;
    for (const auto& d : seq.deltas) ts.push_back(d.translation());
    const Vec3 mean = mean_translation(ts);
    std::vector<Vec3> centred, travel;
    for (const auto& t : ts) {
        centred.push_back(t - mean);
        travel.push_back(t - ts.front());
    }
    Mat3 S = Mat3::Zero();
    for (const auto& v : centred) S.noalias() += v * v.transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> eig(S);
    Vec3 e = eig.eigenvalues()(2) > 0.0 ? Vec3(eig.eigenvectors().col(2)) : Vec3::UnitX();
    double along = 0.0;
    for (const auto& v : travel) along += v.dot(e);
    if (along < 0.0) e = -e;
    m.axis = e.normalized();

    for (const auto& t : ts) m.configurations.push_back((t - ts.front()).dot(m.axis));
    Vec3 b = Vec3::Zero();
    for (std::size_t k = 0; k < ts.size(); ++k) b += ts[k] - m.configurations[k] * m.axis;
    m.base = Posed(mean_rotation(rotations(seq)), b / static_cast<double>(ts.size()));
    finish(m, seq, noise);
    m.degenerate = m.q_max - m.q_min < 1e-3;
    return m;
}

constexpr double kMinRevoluteSpan = 5.0 * kPi / 180.0;

JointModel fit_revolute(const RelativePoseSequence& seq, const NoiseModel& noise) {
    require(seq, 3, "fit_revolute");
    JointModel m;
    m.kind = JointKind::Revolute;

    // Axis: principal direction of the rotation vectors relative to frame 0.
    const Quat r0 = seq.deltas.front().rotation();
    std::vector<Vec3> omegas;
    double span = 0.0;
    for (const auto& d : seq.deltas) {
        omegas.push_back(so3_log(Quat(d.rotation() * r0.conjugate())));
        span = std::max(span, omegas.back().norm());
    }
    const Vec3 a = principal_direction(omegas);
    m.axis = a;

    // Right-handed in-plane basis (u, v, a).
    const Vec3 u = a.unitOrthogonal();
    const Vec3 v = a.cross(u);
    std::vector<Eigen::Vector2d> planar;
    double height = 0.0;
    for (const auto& d : seq.deltas) {
        planar.emplace_back(d.translation().dot(u), d.translation().dot(v));
        height += d.translation().dot(a);
    }
    height /= static_cast<double>(seq.size());

    const Circle circle = fit_circle(planar);
    // Below the minimum span the circle is fitted to noise and its angles are
    // meaningless; the rotation branch then still nests the rigid model.
    const bool use_circle =
        span >= kMinRevoluteSpan && circle.ok && circle.radius > 0.0 && circle.radius_sigma <= circle.radius;
    if (use_circle) {
        double prev = 0.0, offset = 0.0, first = 0.0;
        for (std::size_t k = 0; k < planar.size(); ++k) {
            const Eigen::Vector2d d = planar[k] - circle.center;
            double phi = std::atan2(d.y(), d.x());
            if (k == 0)
                first = phi;
            else
                offset += wrap(phi - prev) - (phi - prev);
            prev = phi;
            m.configurations.push_back(phi + offset - first);
        }
        m.center = circle.center.x() * u + circle.center.y() * v;
        m.radius = circle.radius;
        m.radius_sigma = circle.radius_sigma;
        const Eigen::Vector2d p0 = circle.center + circle.radius * Eigen::Vector2d(std::cos(first), std::sin(first));
        const Vec3 t0 = p0.x() * u + p0.y() * v + height * a;
        std::vector<Quat> bases;
        for (std::size_t k = 0; k < seq.size(); ++k)
            bases.push_back(Quat(Eigen::AngleAxisd(-m.configurations[k], a)) * seq.deltas[k].rotation());
        m.base = Posed(mean_rotation(bases), t0);
    } else {
        // Origin of part i (nearly) on the axis: angles come from the rotations
        // and the axis passes through the mean position.
        double prev = 0.0, offset = 0.0;
        for (std::size_t k = 0; k < omegas.size(); ++k) {
            const double phi = twist_angle(so3_exp(omegas[k]), a);
            if (k > 0) offset += wrap(phi - prev) - (phi - prev);
            prev = phi;
            m.configurations.push_back(phi + offset);
        }
        std::vector<Vec3> ts;
        for (const auto& d : seq.deltas) ts.push_back(d.translation());
        const Vec3 mean = mean_translation(ts);
        m.center = mean - mean.dot(a) * a;
        m.radius = 0.0;
        m.radius_sigma = circle.ok ? circle.radius_sigma : 0.0;
        std::vector<Quat> bases;
        for (std::size_t k = 0; k < seq.size(); ++k)
            bases.push_back(Quat(Eigen::AngleAxisd(-m.configurations[k], a)) * seq.deltas[k].rotation());
        m.base = Posed(mean_rotation(bases), mean);
    }
    finish(m, seq, noise);
    m.degenerate = !use_circle;
    return m;
}

JointModel fit(JointKind kind, const RelativePoseSequence& seq, const NoiseModel& noise) {
    switch (kind) {
        case JointKind::Rigid: return fit_rigid(seq, noise);
        case JointKind::Prismatic: return fit_prismatic(seq, noise);
        case JointKind::Revolute: return fit_revolute(seq, noise);
    }
    return fit_rigid(seq, noise);
}

double project_configuration(const JointModel& model, const Posed& observed, const NoiseModel& noise) {
    switch (model.kind) {
        case JointKind::Rigid: return 0.0;
        case JointKind::Prismatic:
            return (observed.translation() - model.base.translation()).dot(model.axis);
        case JointKind::Revolute: break;
    }
    const auto cost = [&](double q) {
        const auto [dt, da] = pose_distance(observed, model.predict(q));
        return dt * dt / (noise.sigma_pos * noise.sigma_pos) + da * da / (noise.sigma_rot * noise.sigma_rot);
    };
    // Candidates from the rotation and from the position on the circle, then
    // a golden-section polish around the better one.
    std::vector<double> candidates{
        twist_angle(Quat(observed.rotation() * model.base.rotation().conjugate()), model.axis)};
    if (model.radius > 0.0) {
        const Vec3 from = model.base.translation() - model.center;
        const Vec3 to = observed.translation() - model.center;
        const Vec3 f = from - from.dot(model.axis) * model.axis;
        const Vec3 g = to - to.dot(model.axis) * model.axis;
        candidates.push_back(std::atan2(f.cross(g).dot(model.axis), f.dot(g)));
    }
    // Prefer the branch nearest the observed range.
    const double mid = 0.5 * (model.q_min + model.q_max);
    for (double& c : candidates) c = mid + wrap(c - mid);
    double best = candidates.front();
    for (double c : candidates)
        if (cost(c) < cost(best)) best = c;

    double lo = best - 0.35, hi = best + 0.35;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cost(x2);
        }
    }
    const double polished = 0.5 * (lo + hi);
    return cost(polished) < cost(best) ? polished : best;
}

FitError model_fit_error(const JointModel& model, const RelativePoseSequence& seq, const NoiseModel& noise) {
    FitError e;
    if (seq.empty()) return e;
    for (const auto& d : seq.deltas) {
        const auto [dt, da] = pose_distance(d, model.predict(project_configuration(model, d, noise)));
        e.position += dt;
        e.angle += rad2deg(da);
    }
    e.position /= static_cast<double>(seq.size());
    e.angle /= static_cast<double>(seq.size());
    return e;
}

ModelSelection select_model(const RelativePoseSequence& seq, const NoiseModel& noise) {
    validate(noise);
    require(seq, 3, "select_model");
    ModelSelection out;
    for (JointKind kind : kAllJointKinds) out.candidates.push_back(fit(kind, seq, noise));
    out.best = *std::min_element(out.candidates.begin(), out.candidates.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(a.bic, a.parameter_count(), static_cast<int>(a.kind)) <
               std::make_tuple(b.bic, b.parameter_count(), static_cast<int>(b.kind));
    });
    return out;
}

}  // namespace kinlearn
