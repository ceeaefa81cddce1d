#pragma once

#include <Eigen/Dense>
#include <vector>

#include "resmatch/camera.hpp"
#include "resmatch/minimal_problems.hpp"

namespace resmatch {

// One synthetic correspondence problem. Rows of the assignment space are the
// first point set (3D points for P3P/up2p, first-image points for 3P1);
// columns are the 2D points of the last observation list, where outliers, if
// any, are appended. `ground_truth` is injective on the inlier rows.
struct ProblemInstance {
    MinimalProblemKind kind = MinimalProblemKind::kP3p;
    std::vector<Eigen::Vector3d> points3d;
    std::vector<std::vector<Eigen::Vector2d>> observations;  // one or two images
    std::vector<Camera> cameras;                             // aligned with observations
    std::vector<int> ground_truth;                           // row -> true column
    int n_inliers = 0;
    int n_outliers = 0;

    // Dual-motion bookkeeping (up2p): per-point motion id plus the vertical
    // rotation and unit translation applied to the second group before
    // projection. Empty/zero for single-motion instances.
    std::vector<int> motion_labels;
    double motion_yaw = 0.0;
    Eigen::Vector3d motion_translation = Eigen::Vector3d::Zero();

    int num_rows() const { return n_inliers; }
    int num_cols() const {
        return observations.empty() ? 0 : static_cast<int>(observations.back().size());
    }
};

}  // namespace resmatch
