#pragma once

// Training pipeline shared by the CLI and the acceptance suite:
// segment -> per-cluster poses -> pairwise joints -> kinematic tree.

#include <optional>
#include <string>
#include <vector>

#include "kinlearn/demo.hpp"
#include "kinlearn/joints.hpp"
#include "kinlearn/kgraph.hpp"
#include "kinlearn/posegraph.hpp"
#include "kinlearn/segment.hpp"

namespace kinlearn {

struct LearnParams {
    SimilarityParams similarity;
    DbscanParams dbscan;
    PoseGraphParams posegraph;
    NoiseModel noise;
};

struct LearnResult {
    SimilarityMatrix similarity;
    ClusterAssignment assignment;
    /// Empty when segmentation found fewer than two clusters.
    std::optional<KinematicGraph> graph;
    std::vector<std::string> warnings;
};

/// Throws DisconnectedParts when the posed clusters share too few frames.
LearnResult learn(const Demonstration& demo, const std::string& object, const LearnParams& params = {});

Provenance make_provenance(const LearnParams& params, const std::string& demo_file);

}  // namespace kinlearn
