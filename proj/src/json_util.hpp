#pragma once

// nlohmann/json glue shared by the ground-truth and model-database formats.

#include <json.hpp>

#include <string>

#include "kinlearn/errors.hpp"
#include "kinlearn/geom.hpp"

namespace kinlearn::jsonio {

using nlohmann::json;

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

/// {qw, qx, qy, qz, tx, ty, tz}
inline json to_json(const Posed& p) {
    const auto& q = p.rotation();
    const auto& t = p.translation();
    return json::array({q.w(), q.x(), q.y(), q.z(), t.x(), t.y(), t.z()});
}

inline Vec3 vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline Posed pose(const json& j) {
    if (!j.is_array() || j.size() != 7) throw ParseError("expected a pose [qw,qx,qy,qz,tx,ty,tz]");
    const Eigen::Quaterniond q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
    return Posed(q, Vec3(j[4].get<double>(), j[5].get<double>(), j[6].get<double>()));
}

inline json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

}  // namespace kinlearn::jsonio
