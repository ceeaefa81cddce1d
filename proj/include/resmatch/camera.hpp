#pragma once

#include <Eigen/Dense>

#include "resmatch/errors.hpp"

namespace resmatch {

struct Intrinsics {
    double fu = 1000.0;  // focal lengths, pixels
    double fv = 1000.0;
    double cu = 320.0;  // principal point, pixels
    double cv = 240.0;
};

// Pinhole camera. Camera frame: +z forward along the optical axis, +x right,
// +y down in the image. `rotation` maps world to camera coordinates.
struct Camera {
    Intrinsics intrinsics;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d center = Eigen::Vector3d::Zero();  // world units
};

inline Eigen::Vector2d project(const Eigen::Vector3d& point, const Camera& cam) {
    const Eigen::Vector3d pc = cam.rotation * (point - cam.center);
    if (pc.z() <= 0.0) throw BehindCameraError{};
    return {cam.intrinsics.fu * pc.x() / pc.z() + cam.intrinsics.cu,
            cam.intrinsics.fv * pc.y() / pc.z() + cam.intrinsics.cv};
}

// Unit direction of the viewing ray through pixel u, camera coordinates.
inline Eigen::Vector3d calibrated_ray(const Eigen::Vector2d& u, const Intrinsics& k) {
    return Eigen::Vector3d((u.x() - k.cu) / k.fu, (u.y() - k.cv) / k.fv, 1.0).normalized();
}

// World-to-camera rotation looking from `center` toward `target`. The roll
// degree of freedom is fixed by keeping the camera up direction as close as
// possible to world +y (the vertical axis throughout this library).
inline Eigen::Matrix3d look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
    const Eigen::Vector3d z = (target - center).normalized();
    const Eigen::Vector3d down(0.0, -1.0, 0.0);  // camera +y is image-down
    Eigen::Vector3d y = down - down.dot(z) * z;
    const double n = y.norm();
    if (n < 1e-12) throw DegenerateConfigurationError("optical axis parallel to the vertical axis");
    y /= n;
    Eigen::Matrix3d r;
    r.row(0) = y.cross(z);
    r.row(1) = y;
    r.row(2) = z;
    return r;
}

}  // namespace resmatch
