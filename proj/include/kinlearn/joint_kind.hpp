#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace kinlearn {

/// Linkage types, in tie-break order (rigid < prismatic < revolute).
enum class JointKind { Rigid = 0, Prismatic = 1, Revolute = 2 };

inline constexpr JointKind kAllJointKinds[] = {JointKind::Rigid, JointKind::Prismatic, JointKind::Revolute};

inline std::string_view to_string(JointKind kind) {
    switch (kind) {
        case JointKind::Rigid: return "rigid";
        case JointKind::Prismatic: return "prismatic";
        case JointKind::Revolute: return "revolute";
    }
    return "?";
}

inline std::optional<JointKind> parse_joint_kind(std::string_view name) {
    for (JointKind k : kAllJointKinds)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

}  // namespace kinlearn
