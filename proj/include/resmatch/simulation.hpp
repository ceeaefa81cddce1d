#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "resmatch/camera.hpp"
#include "resmatch/errors.hpp"
#include "resmatch/instance.hpp"
#include "resmatch/matching.hpp"
#include "resmatch/minimal_problems.hpp"
#include "resmatch/rng.hpp"
#include "resmatch/tensor.hpp"

namespace resmatch {

inline constexpr int kImageWidth = 640;
inline constexpr int kImageHeight = 480;
inline constexpr double kFocalLength = 1000.0;
inline constexpr double kCubeHalfSide = 2.0;        // points live in a 4x4x4 cube
inline constexpr double kCameraSphereRadius = 12.0;

// Spread of the affinity exponential on unit-norm-coefficient resultants.
// The narrow field of view and the short stereo baseline cluster every
// minimal-problem root near +-1, which pushes the resultant magnitudes of
// the monomial-basis Sylvester matrices down by many orders of magnitude for
// P3P and 3P1; up2p polynomials stay well conditioned. The spreads below were
// calibrated on pilot runs so that mismatched edges land well under e^-1
// while exact edges stay near affinity 1.
inline double default_rho(MinimalProblemKind kind) {
    switch (kind) {
        case MinimalProblemKind::kP3p: return 3e-14;
        case MinimalProblemKind::kThreePlusOne: return 1e-15;
        case MinimalProblemKind::kUp2p: return 1e-4;
    }
    return 1e-8;
}

inline Intrinsics default_intrinsics() {
    return {kFocalLength, kFocalLength, kImageWidth / 2.0, kImageHeight / 2.0};
}

inline bool in_image(const Eigen::Vector2d& u) {
    return u.x() >= 0.0 && u.x() < kImageWidth && u.y() >= 0.0 && u.y() < kImageHeight;
}

enum class SolverKind { kSparse, kDense };

inline const char* to_string(SolverKind s) { return s == SolverKind::kSparse ? "sparse" : "dense"; }

struct ExperimentConfig {
    MinimalProblemKind kind = MinimalProblemKind::kP3p;
    int n = 10;                          // inlier points per instance
    std::vector<double> sigmas{0.0};     // image noise levels, pixels
    std::vector<int> outlier_counts{0};  // extra 2D points per instance
    double baseline = 1.0;               // 3P1 stereo baseline, world units
    int motions = 1;                     // up2p: 1 or 2 rigid motions
    int instances = 100;
    std::vector<int> schedule;  // strictly increasing sample sizes; empty -> default
    double rho = 0.0;           // affinity spread; 0 -> default_rho(kind)
    std::vector<SolverKind> solvers{SolverKind::kSparse};
    std::uint64_t seed = 0;
    int threads = 1;
};

struct AccuracyCurve {
    struct Row {
        int samples = 0;
        double mean_accuracy = 0.0;
        double std_accuracy = 0.0;
    };
    std::vector<Row> rows;
};

struct CellResult {
    double sigma = 0.0;
    int outliers = 0;
    SolverKind solver = SolverKind::kSparse;
    AccuracyCurve curve;
};

inline int default_max_samples(MinimalProblemKind kind) {
    return kind == MinimalProblemKind::kUp2p ? 5000 : 20000;
}

// Ten log-spaced sample sizes from `min_samples` to `max_samples`.
inline std::vector<int> default_schedule(int max_samples, int num_points = 10,
                                         int min_samples = 100) {
    std::vector<int> s;
    if (max_samples <= min_samples) {
        s.push_back(max_samples);
        return s;
    }
    const double llo = std::log(static_cast<double>(min_samples));
    const double lhi = std::log(static_cast<double>(max_samples));
    for (int i = 0; i < num_points; ++i) {
        const double t = static_cast<double>(i) / (num_points - 1);
        int v = static_cast<int>(std::llround(std::exp(llo + t * (lhi - llo))));
        v = std::min(std::max(v, min_samples), max_samples);
        if (s.empty() || v > s.back()) s.push_back(v);
    }
    s.back() = max_samples;
    return s;
}

namespace detail {

inline Eigen::Vector3d random_unit_vector(Rng& rng) {
    for (;;) {
        const Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
        const double n = v.norm();
        if (n > 1e-9) return v / n;
    }
}

inline Eigen::Vector3d random_cube_point(Rng& rng) {
    return {rng.uniform(-kCubeHalfSide, kCubeHalfSide), rng.uniform(-kCubeHalfSide, kCubeHalfSide),
            rng.uniform(-kCubeHalfSide, kCubeHalfSide)};
}

inline bool project_in_frame(const Eigen::Vector3d& point, const Camera& cam, Eigen::Vector2d& out) {
    const Eigen::Vector3d pc = cam.rotation * (point - cam.center);
    if (pc.z() <= 0.0) return false;
    out = {cam.intrinsics.fu * pc.x() / pc.z() + cam.intrinsics.cu,
           cam.intrinsics.fv * pc.y() / pc.z() + cam.intrinsics.cv};
    return in_image(out);
}

// Shuffles projections into column order and records row -> column.
inline void place_shuffled(const std::vector<Eigen::Vector2d>& proj, Rng& rng,
                           std::vector<Eigen::Vector2d>& obs, std::vector<int>& ground_truth) {
    const int n = static_cast<int>(proj.size());
    const std::vector<int> perm = rng.permutation(n);
    obs.assign(static_cast<std::size_t>(n), Eigen::Vector2d::Zero());
    ground_truth.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        obs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = proj[static_cast<std::size_t>(i)];
        ground_truth[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)];
    }
}

inline constexpr int kMaxGenerationAttempts = 10000;

}  // namespace detail

// n points uniform in the 4x4x4 cube about the origin, camera center uniform
// on the radius-12 sphere, optical axis through the origin. Draws are
// rejected until every point projects inside the 640x480 frame, then the 2D
// list is shuffled so the identity assignment carries no information.
inline ProblemInstance gen_p3p_instance(const ExperimentConfig& cfg, Rng& rng) {
    ProblemInstance inst;
    inst.kind = MinimalProblemKind::kP3p;
    const int n = cfg.n;
    Camera cam;
    cam.intrinsics = default_intrinsics();
    std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(n));
    std::vector<Eigen::Vector2d> proj(static_cast<std::size_t>(n));
    for (int attempt = 0;; ++attempt) {
        if (attempt >= detail::kMaxGenerationAttempts)
            throw std::runtime_error("p3p instance generation failed to satisfy the field of view");
        cam.center = kCameraSphereRadius * detail::random_unit_vector(rng);
        try {
            cam.rotation = look_at(cam.center, Eigen::Vector3d::Zero());
        } catch (const DegenerateConfigurationError&) {
            continue;  // polar camera has no well-defined roll
        }
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            pts[static_cast<std::size_t>(i)] = detail::random_cube_point(rng);
            ok = detail::project_in_frame(pts[static_cast<std::size_t>(i)], cam, proj[static_cast<std::size_t>(i)]);
        }
        if (ok) break;
    }
    inst.points3d = pts;
    inst.cameras = {cam};
    inst.observations.emplace_back();
    detail::place_shuffled(proj, rng, inst.observations[0], inst.ground_truth);
    inst.n_inliers = n;
    return inst;
}

// Two-view setup: first camera on the equator of the radius-12 sphere, second
// displaced by the stereo baseline inside the equatorial plane, both optical
// axes through the origin. Both cameras are therefore vertical and their
// relative rotation is about the vertical axis. Rows are first-image points
// in generation order; the second image is shuffled.
inline ProblemInstance gen_3p1_instance(const ExperimentConfig& cfg, Rng& rng) {
    ProblemInstance inst;
    inst.kind = MinimalProblemKind::kThreePlusOne;
    const int n = cfg.n;
    Camera cam1, cam2;
    cam1.intrinsics = cam2.intrinsics = default_intrinsics();
    std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(n));
    std::vector<Eigen::Vector2d> proj1(static_cast<std::size_t>(n)), proj2(static_cast<std::size_t>(n));
    for (int attempt = 0;; ++attempt) {
        if (attempt >= detail::kMaxGenerationAttempts)
            throw std::runtime_error("3p1 instance generation failed to satisfy the field of view");
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        cam1.center = kCameraSphereRadius * Eigen::Vector3d(std::cos(phi), 0.0, std::sin(phi));
        const double psi = rng.uniform(0.0, 2.0 * kPi);
        cam2.center = cam1.center + cfg.baseline * Eigen::Vector3d(std::cos(psi), 0.0, std::sin(psi));
        if (cam2.center.norm() < 1e-6) continue;
        cam1.rotation = look_at(cam1.center, Eigen::Vector3d::Zero());
        cam2.rotation = look_at(cam2.center, Eigen::Vector3d::Zero());
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            pts[static_cast<std::size_t>(i)] = detail::random_cube_point(rng);
            ok = detail::project_in_frame(pts[static_cast<std::size_t>(i)], cam1, proj1[static_cast<std::size_t>(i)]) &&
                 detail::project_in_frame(pts[static_cast<std::size_t>(i)], cam2, proj2[static_cast<std::size_t>(i)]);
        }
        if (ok) break;
    }
    inst.points3d = pts;
    inst.cameras = {cam1, cam2};
    inst.observations.resize(2);
    inst.observations[0] = proj1;
    detail::place_shuffled(proj2, rng, inst.observations[1], inst.ground_truth);
    inst.n_inliers = n;
    return inst;
}

// Vertical camera as in the 3P1 setup. With two motions, a random rotation
// about the vertical axis plus a random unit translation transforms the
// second half of the 3D points before projection; motion_labels records the
// split. The stored 3D points stay untransformed.
inline ProblemInstance gen_up2p_instance(const ExperimentConfig& cfg, Rng& rng) {
    ProblemInstance inst;
    inst.kind = MinimalProblemKind::kUp2p;
    const int n = cfg.n;
    const int first_motion = cfg.motions == 2 ? n / 2 : n;
    Camera cam;
    cam.intrinsics = default_intrinsics();
    std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(n));
    std::vector<Eigen::Vector2d> proj(static_cast<std::size_t>(n));
    double yaw = 0.0;
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    for (int attempt = 0;; ++attempt) {
        if (attempt >= detail::kMaxGenerationAttempts)
            throw std::runtime_error("up2p instance generation failed to satisfy the field of view");
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        cam.center = kCameraSphereRadius * Eigen::Vector3d(std::cos(phi), 0.0, std::sin(phi));
        cam.rotation = look_at(cam.center, Eigen::Vector3d::Zero());
        Eigen::Matrix3d motion = Eigen::Matrix3d::Identity();
        if (cfg.motions == 2) {
            yaw = rng.uniform(0.0, 2.0 * kPi);
            translation = detail::random_unit_vector(rng);
            motion = rotation_about_y(yaw);
        }
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            pts[static_cast<std::size_t>(i)] = detail::random_cube_point(rng);
            const Eigen::Vector3d placed = i < first_motion
                                               ? pts[static_cast<std::size_t>(i)]
                                               : Eigen::Vector3d(motion * pts[static_cast<std::size_t>(i)] + translation);
            ok = detail::project_in_frame(placed, cam, proj[static_cast<std::size_t>(i)]);
        }
        if (ok) break;
    }
    inst.points3d = pts;
    inst.cameras = {cam};
    inst.observations.emplace_back();
    detail::place_shuffled(proj, rng, inst.observations[0], inst.ground_truth);
    inst.n_inliers = n;
    inst.motion_labels.assign(static_cast<std::size_t>(n), 0);
    if (cfg.motions == 2) {
        for (int i = first_motion; i < n; ++i) inst.motion_labels[static_cast<std::size_t>(i)] = 1;
        inst.motion_yaw = yaw;
        inst.motion_translation = translation;
    }
    return inst;
}

inline ProblemInstance generate_instance(const ExperimentConfig& cfg, Rng& rng) {
    switch (cfg.kind) {
        case MinimalProblemKind::kP3p: return gen_p3p_instance(cfg, rng);
        case MinimalProblemKind::kThreePlusOne: return gen_3p1_instance(cfg, rng);
        case MinimalProblemKind::kUp2p: return gen_up2p_instance(cfg, rng);
    }
    throw std::invalid_argument("unknown problem kind");
}

// Appends `outlier_count` uniform image points to the last observation list,
// then adds Gaussian pixel noise to every 2D point of every list — outliers
// included, since they are inserted first. 3D points are untouched.
inline ProblemInstance corrupt(ProblemInstance inst, double sigma, int outlier_count, Rng& rng) {
    auto& last = inst.observations.back();
    for (int k = 0; k < outlier_count; ++k)
        last.emplace_back(rng.uniform(0.0, static_cast<double>(kImageWidth)),
                          rng.uniform(0.0, static_cast<double>(kImageHeight)));
    inst.n_outliers += outlier_count;
    for (auto& obs : inst.observations)
        for (auto& u : obs) {
            u.x() += sigma * rng.normal();
            u.y() += sigma * rng.normal();
        }
    return inst;
}

// Runs the full protocol: per (sigma, outliers) cell and per instance, sample
// the largest scheduled number of hyper-edges once, score them, then solve on
// every schedule prefix and average accuracies over instances. Instances are
// independent substreams of the seed, so any thread count produces the same
// result bit for bit.
inline std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.schedule.empty()) c.schedule = default_schedule(default_max_samples(c.kind));
    if (c.rho == 0.0) c.rho = default_rho(c.kind);
    for (std::size_t i = 0; i + 1 < c.schedule.size(); ++i)
        if (c.schedule[i] >= c.schedule[i + 1])
            throw std::invalid_argument("sample schedule must be strictly increasing");
    if (c.schedule.front() < 1) throw std::invalid_argument("sample schedule must be positive");
    if (c.instances < 1) throw std::invalid_argument("instance count must be positive");
    if (c.rho < 0.0) throw std::invalid_argument("rho must be positive");
    if (c.sigmas.empty() || c.outlier_counts.empty() || c.solvers.empty())
        throw std::invalid_argument("sigmas, outlier counts and solvers must be nonempty");
    const int order = hyper_edge_order(c.kind);
    if (c.n < order) throw InsufficientPointsError{};

    const int n_cells = static_cast<int>(c.sigmas.size() * c.outlier_counts.size());
    const int n_solvers = static_cast<int>(c.solvers.size());
    const int n_sizes = static_cast<int>(c.schedule.size());
    std::vector<double> acc(static_cast<std::size_t>(n_cells) * n_solvers * n_sizes * c.instances, 0.0);
    const auto slot = [&](int cell, int sv, int si, int k) {
        return ((static_cast<std::size_t>(cell) * n_solvers + sv) * n_sizes + si) * c.instances + k;
    };

    const int total_tasks = n_cells * c.instances;
    std::atomic<int> cursor{0};
    const auto worker = [&]() {
        for (;;) {
            const int task = cursor.fetch_add(1);
            if (task >= total_tasks) return;
            const int cell = task / c.instances;
            const int k = task % c.instances;
            const double sigma = c.sigmas[static_cast<std::size_t>(cell) / c.outlier_counts.size()];
            const int outliers = c.outlier_counts[static_cast<std::size_t>(cell) % c.outlier_counts.size()];
            Rng rng = Rng::stream(c.seed, (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(k));
            const ProblemInstance inst = corrupt(generate_instance(c, rng), sigma, outliers, rng);
            const auto samples =
                sample_hyperedges(inst.num_rows(), inst.num_cols(), order, c.schedule.back(), rng);
            std::vector<double> affinity(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
                affinity[i] = edge_affinity(c.kind, inst, samples[i], c.rho);
            TensorBuilder builder(order, inst.num_rows(), inst.num_cols());
            const AssignmentMatrix x0 = uniform_assignment(inst.num_rows(), inst.num_cols());
            for (int si = 0; si < n_sizes; ++si) {
                builder.extend(samples, affinity, static_cast<std::size_t>(c.schedule[static_cast<std::size_t>(si)]));
                for (int sv = 0; sv < n_solvers; ++sv) {
                    // Heavy noise can zero out every sampled affinity; the
                    // assignment is then uninformed rather than an error.
                    const AssignmentMatrix soft =
                        !builder.tensor().has_positive_entry() ? x0
                        : c.solvers[static_cast<std::size_t>(sv)] == SolverKind::kSparse
                            ? power_iteration_sparse(builder.tensor(), x0)
                            : power_iteration_dense(builder.tensor(), x0);
                    acc[slot(cell, sv, si, k)] =
                        accuracy(discretize(soft), inst.ground_truth, inst.n_inliers);
                }
            }
        }
    };

    if (c.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min(c.threads, total_tasks);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Sequential reduction over the stored slots keeps the output independent
    // of worker scheduling.
    std::vector<CellResult> results;
    results.reserve(static_cast<std::size_t>(n_cells) * n_solvers);
    for (int cell = 0; cell < n_cells; ++cell) {
        for (int sv = 0; sv < n_solvers; ++sv) {
            CellResult r;
            r.sigma = c.sigmas[static_cast<std::size_t>(cell) / c.outlier_counts.size()];
            r.outliers = c.outlier_counts[static_cast<std::size_t>(cell) % c.outlier_counts.size()];
            r.solver = c.solvers[static_cast<std::size_t>(sv)];
            for (int si = 0; si < n_sizes; ++si) {
                double sum = 0.0;
                for (int k = 0; k < c.instances; ++k) sum += acc[slot(cell, sv, si, k)];
                const double mean = sum / c.instances;
                double var = 0.0;
                for (int k = 0; k < c.instances; ++k) {
                    const double d = acc[slot(cell, sv, si, k)] - mean;
                    var += d * d;
                }
                r.curve.rows.push_back({c.schedule[static_cast<std::size_t>(si)], mean,
                                        std::sqrt(var / c.instances)});
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

}  // namespace resmatch
