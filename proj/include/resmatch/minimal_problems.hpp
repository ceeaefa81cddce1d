#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "resmatch/camera.hpp"
#include "resmatch/errors.hpp"
#include "resmatch/polynomial.hpp"

namespace resmatch {

enum class MinimalProblemKind { kP3p, kThreePlusOne, kUp2p };

// Size m of a minimal correspondence set.
inline int minimal_set_size(MinimalProblemKind kind) {
    return kind == MinimalProblemKind::kUp2p ? 2 : 3;
}

// A hyper-edge joins two minimal sets overlapping in all but one
// correspondence, hence order m+1.
inline int hyper_edge_order(MinimalProblemKind kind) { return minimal_set_size(kind) + 1; }

inline int minimal_polynomial_degree(MinimalProblemKind kind) {
    return kind == MinimalProblemKind::kUp2p ? 2 : 4;
}

inline const char* to_string(MinimalProblemKind kind) {
    switch (kind) {
        case MinimalProblemKind::kP3p: return "p3p";
        case MinimalProblemKind::kThreePlusOne: return "3p1";
        case MinimalProblemKind::kUp2p: return "up2p";
    }
    return "unknown";
}

// Geometry thinner than this is degenerate: pairwise 3D distance in world
// units, ray separation in radians. The cosine-law systems lose rank there.
inline constexpr double kMinPointSeparation = 1e-9;
inline constexpr double kMinRaySeparation = 1e-9;

namespace detail {

inline double ray_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Dense polynomial arithmetic on descending coefficient vectors; only used to
// assemble the fixed-degree minimal-problem coefficients.
inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b) {
    if (a.size() < b.size()) a.insert(a.begin(), b.size() - a.size(), 0.0);
    const std::size_t off = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[off + i] += b[i];
    return a;
}

inline std::vector<double> poly_scale(std::vector<double> a, double s) {
    for (double& c : a) c *= s;
    return a;
}

inline bool all_zero(const std::vector<double>& a) {
    for (double c : a)
        if (c != 0.0) return false;
    return true;
}

}  // namespace detail

// Quartic in x = b/a, the ratio of the distances of Xb and Xa from the camera
// center. The law of cosines on the view triangles O-Xa-Xb, O-Xb-Xc, O-Xc-Xa
// gives three quadratics in the distances; dividing by a^2 and substituting
// a^2 = Rab^2 / f1(x) with f1(x) = x^2 - 2 Cab x + 1 leaves two monic
// quadratics in y = c/a,
//   y^2 + p1 y + q1(x) = 0,   p1 = -2 Cca,    q1 = 1 - (Rca^2/Rab^2) f1,
//   y^2 + p2 y + q2(x) = 0,   p2 = -2 Cbc x,  q2 = x^2 - (Rbc^2/Rab^2) f1,
// whose resultant in y is a quartic in x. For exact correspondences the true
// depth ratio is a root. Coefficients are returned unit-norm.
inline Polynomial p3p_quartic(const Eigen::Vector3d& point_a, const Eigen::Vector3d& point_b,
                              const Eigen::Vector3d& point_c, const Eigen::Vector2d& pixel_a,
                              const Eigen::Vector2d& pixel_b, const Eigen::Vector2d& pixel_c,
                              const Intrinsics& intrinsics) {
    const double rab2 = (point_a - point_b).squaredNorm();
    const double rbc2 = (point_b - point_c).squaredNorm();
    const double rca2 = (point_c - point_a).squaredNorm();
    const double min_sep2 = kMinPointSeparation * kMinPointSeparation;
    if (rab2 < min_sep2 || rbc2 < min_sep2 || rca2 < min_sep2)
        throw DegenerateConfigurationError("coincident 3D points in P3P minimal set");

    const Eigen::Vector3d ray_a = calibrated_ray(pixel_a, intrinsics);
    const Eigen::Vector3d ray_b = calibrated_ray(pixel_b, intrinsics);
    const Eigen::Vector3d ray_c = calibrated_ray(pixel_c, intrinsics);
    if (detail::ray_angle(ray_a, ray_b) < kMinRaySeparation ||
        detail::ray_angle(ray_b, ray_c) < kMinRaySeparation ||
        detail::ray_angle(ray_c, ray_a) < kMinRaySeparation)
        throw DegenerateConfigurationError("coincident image rays in P3P minimal set");

    const double cab = ray_a.dot(ray_b);
    const double cbc = ray_b.dot(ray_c);
    const double cca = ray_c.dot(ray_a);
    const double ka = rca2 / rab2;
    const double kb = rbc2 / rab2;

    using detail::poly_add;
    using detail::poly_mul;
    using detail::poly_scale;
    // dp = p2 - p1, dq = q2 - q1; resultant of two monic quadratics sharing
    // the variable y: dp^2 q1 - p1 dp dq + dq^2.
    const double p1 = -2.0 * cca;
    const std::vector<double> dp{-2.0 * cbc, 2.0 * cca};
    const std::vector<double> dq{1.0 + ka - kb, -2.0 * cab * (ka - kb), (ka - kb) - 1.0};
    const std::vector<double> q1{-ka, 2.0 * ka * cab, 1.0 - ka};

    std::vector<double> res = poly_mul(poly_mul(dp, dp), q1);
    res = poly_add(res, poly_scale(poly_mul(dp, dq), -p1));
    res = poly_add(res, poly_mul(dq, dq));
    if (detail::all_zero(res)) throw DegenerateConfigurationError("vanishing P3P quartic");
    return normalize(Polynomial(std::move(res)));
}

// Quartic in x = cos(theta), theta the rotation angle about the camera y axis
// between two views whose relative rotation is known to be about that axis.
// Each correspondence contributes an epipolar direction
//   m_i(theta) = (R_y(theta) q_i) x q'_i,
// and a translation consistent with all three exists only when
// det[m_1 m_2 m_3] = 0. On the unit circle that determinant reduces to
// P(cos theta) + sin(theta) Q(cos theta) with deg P = 2 and deg Q = 1;
// multiplying by the sin-conjugate eliminates the sine and leaves
//   F(x) = P(x)^2 - (1 - x^2) Q(x)^2,
// a quartic vanishing at the true cos(theta) for exact data.
inline Polynomial three_plus_one_quartic(const Eigen::Vector2d& view1_a, const Eigen::Vector2d& view1_b,
                                         const Eigen::Vector2d& view1_c, const Eigen::Vector2d& view2_a,
                                         const Eigen::Vector2d& view2_b, const Eigen::Vector2d& view2_c,
                                         const Intrinsics& intrinsics) {
    const std::array<Eigen::Vector3d, 3> a = {calibrated_ray(view1_a, intrinsics),
                                              calibrated_ray(view1_b, intrinsics),
                                              calibrated_ray(view1_c, intrinsics)};
    const std::array<Eigen::Vector3d, 3> b = {calibrated_ray(view2_a, intrinsics),
                                              calibrated_ray(view2_b, intrinsics),
                                              calibrated_ray(view2_c, intrinsics)};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (detail::ray_angle(a[i], a[j]) < kMinRaySeparation &&
                detail::ray_angle(b[i], b[j]) < kMinRaySeparation)
                throw DegenerateConfigurationError("repeated correspondence in 3P1 minimal set");

    // m_i = cos(theta) A_i + sin(theta) B_i + D_i.
    Eigen::Matrix3d col_a, col_b, col_d;
    for (int i = 0; i < 3; ++i) {
        const double a1 = a[i].x(), a2 = a[i].y(), a3 = a[i].z();
        const double b1 = b[i].x(), b2 = b[i].y(), b3 = b[i].z();
        col_a.col(i) = Eigen::Vector3d(-a3 * b2, a3 * b1 - a1 * b3, a1 * b2);
        col_b.col(i) = Eigen::Vector3d(a1 * b2, -(a1 * b1 + a3 * b3), a3 * b2);
        col_d.col(i) = Eigen::Vector3d(a2 * b3, 0.0, -a2 * b1);
    }

    // Multilinear expansion over the column choices; d[p][q] collects the
    // cos^p sin^q coefficient.
    double d[4][4] = {};
    const Eigen::Matrix3d* cols[3] = {&col_a, &col_b, &col_d};
    for (int s1 = 0; s1 < 3; ++s1)
        for (int s2 = 0; s2 < 3; ++s2)
            for (int s3 = 0; s3 < 3; ++s3) {
                Eigen::Matrix3d m;
                m.col(0) = cols[s1]->col(0);
                m.col(1) = cols[s2]->col(1);
                m.col(2) = cols[s3]->col(2);
                const int p = (s1 == 0) + (s2 == 0) + (s3 == 0);
                const int q = (s1 == 1) + (s2 == 1) + (s3 == 1);
                d[p][q] += m.determinant();
            }

    // Reduce sin^2 -> 1 - cos^2. The determinant is a trigonometric
    // polynomial of degree two, so the cubic part cancels identically
    // (d30 == d12 and d21 == d03 up to rounding); the pairs are averaged.
    const double pc2 = d[2][0] - d[0][2];
    const double pc1 = d[1][0] + 0.5 * (d[1][2] + d[3][0]);
    const double pc0 = d[0][0] + d[0][2];
    const double qc1 = d[1][1];
    const double qc0 = d[0][1] + 0.5 * (d[0][3] + d[2][1]);

    std::vector<double> f{pc2 * pc2 + qc1 * qc1,
                          2.0 * (pc2 * pc1 + qc1 * qc0),
                          pc1 * pc1 + 2.0 * pc2 * pc0 - qc1 * qc1 + qc0 * qc0,
                          2.0 * (pc1 * pc0 - qc1 * qc0),
                          pc0 * pc0 - qc0 * qc0};
    if (detail::all_zero(f)) throw DegenerateConfigurationError("vanishing 3P1 quartic");
    return normalize(Polynomial(std::move(f)));
}

// Quadratic in x = tan(theta/2) for the absolute pose of a vertical camera,
// i.e. a world-to-camera rotation of the form R_y(theta) * diag(1,-1,-1)
// (world +y vertical, optical axis horizontal, image y toward world -y).
// With the rational parametrization
//   (1 + x^2) R_y(theta) = [[1-x^2, 0, 2x], [0, 1+x^2, 0], [-2x, 0, 1-x^2]]
// the two cross-product projection constraints per correspondence are linear
// in the translation with x-free coefficients. Solvability of the resulting
// 4x3 system requires the bordered 4x4 determinant to vanish, which is
// quadratic in x; the true tan(theta/2) is a root for exact data.
inline Polynomial up2p_quadratic(const Eigen::Vector3d& point_1, const Eigen::Vector3d& point_2,
                                 const Eigen::Vector2d& pixel_1, const Eigen::Vector2d& pixel_2,
                                 const Intrinsics& intrinsics) {
    if ((point_1 - point_2).norm() < kMinPointSeparation)
        throw DegenerateConfigurationError("coincident 3D points in up2p minimal set");
    const Eigen::Vector3d q1 = calibrated_ray(pixel_1, intrinsics);
    const Eigen::Vector3d q2 = calibrated_ray(pixel_2, intrinsics);
    if (detail::ray_angle(q1, q2) < kMinRaySeparation)
        throw DegenerateConfigurationError("coincident image rays in up2p minimal set");

    // Base alignment of a vertical camera, undone on the 3D points.
    const auto flip = [](const Eigen::Vector3d& v) { return Eigen::Vector3d(v.x(), -v.y(), -v.z()); };
    const Eigen::Vector3d x1 = flip(point_1);
    const Eigen::Vector3d x2 = flip(point_2);

    // (1 + x^2) R_y split by powers of x.
    Eigen::Matrix3d r2, r1;
    r2 << -1, 0, 0, 0, 1, 0, 0, 0, -1;
    r1 << 0, 0, 2, 0, 0, 0, -2, 0, 0;

    // First two rows of [q]_x per correspondence; constant in x.
    Eigen::Matrix<double, 4, 3> lhs;
    lhs.row(0) = Eigen::Vector3d(0.0, -q1.z(), q1.y());
    lhs.row(1) = Eigen::Vector3d(q1.z(), 0.0, -q1.x());
    lhs.row(2) = Eigen::Vector3d(0.0, -q2.z(), q2.y());
    lhs.row(3) = Eigen::Vector3d(q2.z(), 0.0, -q2.x());

    // Border column split by powers of x.
    Eigen::Vector4d b2, b1, b0;
    const Eigen::Vector3d w2a = q1.cross(r2 * x1), w1a = q1.cross(r1 * x1), w0a = q1.cross(x1);
    const Eigen::Vector3d w2b = q2.cross(r2 * x2), w1b = q2.cross(r1 * x2), w0b = q2.cross(x2);
    b2 << w2a.x(), w2a.y(), w2b.x(), w2b.y();
    b1 << w1a.x(), w1a.y(), w1b.x(), w1b.y();
    b0 << w0a.x(), w0a.y(), w0b.x(), w0b.y();

    // Cofactor expansion of det[lhs | b(x)] along the border column.
    Eigen::Vector4d cof;
    for (int r = 0; r < 4; ++r) {
        Eigen::Matrix3d minor;
        int out = 0;
        for (int i = 0; i < 4; ++i) {
            if (i == r) continue;
            minor.row(out++) = lhs.row(i);
        }
        cof(r) = ((r + 3) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
    }

    std::vector<double> h{b2.dot(cof), b1.dot(cof), b0.dot(cof)};
    if (detail::all_zero(h)) throw DegenerateConfigurationError("vanishing up2p quadratic");
    return normalize(Polynomial(std::move(h)));
}

// Rotation by `angle` about the +y (vertical) axis.
inline Eigen::Matrix3d rotation_about_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

// Angle theta of a vertical camera, R = R_y(theta) * diag(1,-1,-1).
inline double vertical_camera_yaw(const Eigen::Matrix3d& world_to_camera) {
    Eigen::Matrix3d ry = world_to_camera;
    ry.col(1) *= -1.0;
    ry.col(2) *= -1.0;
    return std::atan2(ry(0, 2), ry(0, 0));
}

// Relative rotation angle about the camera y axis between two vertical
// cameras: R_2 R_1^T = R_y(theta).
inline double relative_camera_yaw(const Eigen::Matrix3d& rotation_1, const Eigen::Matrix3d& rotation_2) {
    const Eigen::Matrix3d rel = rotation_2 * rotation_1.transpose();
    return std::atan2(rel(0, 2), rel(0, 0));
}

// Shared P3P variable of an exact instance: ratio of camera-center distances.
inline double p3p_depth_ratio(const Camera& cam, const Eigen::Vector3d& point_a,
                              const Eigen::Vector3d& point_b) {
    return (point_b - cam.center).norm() / (point_a - cam.center).norm();
}

}  // namespace resmatch
