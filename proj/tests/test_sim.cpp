#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "resmatch/simulation.hpp"

using Eigen::Vector2d;
using Eigen::Vector3d;
using resmatch::ExperimentConfig;
using resmatch::MinimalProblemKind;
using resmatch::ProblemInstance;
using resmatch::Rng;

namespace {

ExperimentConfig base_config(MinimalProblemKind kind, int n = 10) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.n = n;
    return cfg;
}

bool same_instance(const ProblemInstance& a, const ProblemInstance& b) {
    if (a.points3d.size() != b.points3d.size() || a.ground_truth != b.ground_truth) return false;
    for (std::size_t i = 0; i < a.points3d.size(); ++i)
        if (a.points3d[i] != b.points3d[i]) return false;
    for (std::size_t v = 0; v < a.observations.size(); ++v)
        for (std::size_t i = 0; i < a.observations[v].size(); ++i)
            if (a.observations[v][i] != b.observations[v][i]) return false;
    return true;
}

}  // namespace

TEST(GenP3p, PointsProjectInsideTheFrame) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const ProblemInstance inst = gen_p3p_instance(cfg, rng);
        for (int i = 0; i < inst.n_inliers; ++i) {
            const Vector2d u = project(inst.points3d[static_cast<std::size_t>(i)], inst.cameras[0]);
            EXPECT_TRUE(resmatch::in_image(u));
            // the shuffled observation list holds exactly this projection
            const Vector2d stored =
                inst.observations[0][static_cast<std::size_t>(inst.ground_truth[static_cast<std::size_t>(i)])];
            EXPECT_EQ(u, stored);
        }
    }
}

TEST(GenP3p, CameraOnRadius12Sphere) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const ProblemInstance inst = gen_p3p_instance(cfg, rng);
        EXPECT_NEAR(inst.cameras[0].center.norm(), 12.0, 1e-10);
        // optical axis passes through the origin
        const Vector3d axis = inst.cameras[0].rotation.row(2);
        EXPECT_LT((axis + inst.cameras[0].center.normalized()).norm(), 1e-10);
    }
}

TEST(GenP3p, DeterministicGivenSeed) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng a(77), b(77);
    EXPECT_TRUE(same_instance(gen_p3p_instance(cfg, a), gen_p3p_instance(cfg, b)));
}

TEST(GenP3p, GroundTruthIsInjective) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng rng(3);
    const ProblemInstance inst = gen_p3p_instance(cfg, rng);
    std::set<int> cols(inst.ground_truth.begin(), inst.ground_truth.end());
    EXPECT_EQ(static_cast<int>(cols.size()), inst.n_inliers);
}

TEST(Gen3p1, EquatorialCamerasWithBaseline) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kThreePlusOne);
    cfg.baseline = 2.5;
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const ProblemInstance inst = gen_3p1_instance(cfg, rng);
        ASSERT_EQ(inst.cameras.size(), 2u);
        EXPECT_NEAR(inst.cameras[0].center.y(), 0.0, 1e-12);
        EXPECT_NEAR(inst.cameras[1].center.y(), 0.0, 1e-12);
        EXPECT_NEAR(inst.cameras[0].center.norm(), 12.0, 1e-10);
        EXPECT_NEAR((inst.cameras[1].center - inst.cameras[0].center).norm(), cfg.baseline, 1e-10);
        // relative rotation is about the camera vertical axis
        const Eigen::Matrix3d rel =
            inst.cameras[1].rotation * inst.cameras[0].rotation.transpose();
        const Vector3d y_axis(0, 1, 0);
        EXPECT_LT((rel * y_axis - y_axis).norm(), 1e-8);
    }
}

TEST(Gen3p1, BothViewsInsideTheFrame) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kThreePlusOne);
    cfg.baseline = 5.0;
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const ProblemInstance inst = gen_3p1_instance(cfg, rng);
        for (int i = 0; i < inst.n_inliers; ++i) {
            EXPECT_TRUE(resmatch::in_image(inst.observations[0][static_cast<std::size_t>(i)]));
            EXPECT_TRUE(resmatch::in_image(
                inst.observations[1][static_cast<std::size_t>(inst.ground_truth[static_cast<std::size_t>(i)])]));
        }
    }
}

TEST(GenUp2p, SingleMotionLabelsUniform) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kUp2p);
    Rng rng(6);
    const ProblemInstance inst = gen_up2p_instance(cfg, rng);
    ASSERT_EQ(inst.motion_labels.size(), 10u);
    for (int l : inst.motion_labels) EXPECT_EQ(l, 0);
}

TEST(GenUp2p, DualMotionSplitsAndUnitTranslation) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kUp2p);
    cfg.motions = 2;
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const ProblemInstance inst = gen_up2p_instance(cfg, rng);
        int zeros = 0, ones = 0;
        for (int l : inst.motion_labels) (l == 0 ? zeros : ones)++;
        EXPECT_EQ(zeros, 5);
        EXPECT_EQ(ones, 5);
        EXPECT_NEAR(inst.motion_translation.norm(), 1.0, 1e-12);
        // transformed points are what was projected
        const Eigen::Matrix3d rot = resmatch::rotation_about_y(inst.motion_yaw);
        for (int i = 5; i < 10; ++i) {
            const Vector3d placed = rot * inst.points3d[static_cast<std::size_t>(i)] + inst.motion_translation;
            const Vector2d u = project(placed, inst.cameras[0]);
            EXPECT_LT((u - inst.observations[0][static_cast<std::size_t>(
                               inst.ground_truth[static_cast<std::size_t>(i)])]).norm(),
                      1e-12);
        }
    }
}

TEST(Corrupt, NoOpWithoutNoiseAndOutliers) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng rng(8);
    const ProblemInstance inst = gen_p3p_instance(cfg, rng);
    Rng noise_rng(9);
    const ProblemInstance same = corrupt(inst, 0.0, 0, noise_rng);
    EXPECT_TRUE(same_instance(inst, same));
}

TEST(Corrupt, AppendsOutliersThenNoisesEverything) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    Rng rng(10);
    const ProblemInstance inst = gen_p3p_instance(cfg, rng);

    Rng ra(11);
    const ProblemInstance with_outliers = corrupt(inst, 0.0, 5, ra);
    EXPECT_EQ(with_outliers.num_cols(), 15);
    EXPECT_EQ(with_outliers.ground_truth.size(), 10u);
    EXPECT_EQ(with_outliers.n_outliers, 5);
    for (int k = 10; k < 15; ++k)
        EXPECT_TRUE(resmatch::in_image(with_outliers.observations[0][static_cast<std::size_t>(k)]));

    // identical rng: the outlier draws come first, so the outlier positions
    // match, and the added noise then moves them
    Rng rb(11);
    const ProblemInstance noisy = corrupt(inst, 1.0, 5, rb);
    bool outliers_perturbed = false;
    for (int k = 10; k < 15; ++k)
        outliers_perturbed =
            outliers_perturbed || (noisy.observations[0][static_cast<std::size_t>(k)] !=
                                   with_outliers.observations[0][static_cast<std::size_t>(k)]);
    EXPECT_TRUE(outliers_perturbed);
    // 3D points untouched
    for (std::size_t i = 0; i < inst.points3d.size(); ++i)
        EXPECT_EQ(noisy.points3d[i], inst.points3d[i]);
}

TEST(Corrupt, NoisesBothImagesFor3p1) {
    const ExperimentConfig cfg = base_config(MinimalProblemKind::kThreePlusOne);
    Rng rng(12);
    const ProblemInstance inst = gen_3p1_instance(cfg, rng);
    Rng noise_rng(13);
    const ProblemInstance noisy = corrupt(inst, 0.5, 3, noise_rng);
    EXPECT_EQ(noisy.observations[0].size(), 10u);  // outliers go to the second image only
    EXPECT_EQ(noisy.observations[1].size(), 13u);
    bool first_moved = false;
    for (std::size_t i = 0; i < 10; ++i)
        first_moved = first_moved || noisy.observations[0][i] != inst.observations[0][i];
    EXPECT_TRUE(first_moved);
}

TEST(Schedule, LogSpacedStrictlyIncreasing) {
    const auto s = resmatch::default_schedule(20000);
    ASSERT_EQ(s.size(), 10u);
    EXPECT_EQ(s.front(), 100);
    EXPECT_EQ(s.back(), 20000);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) EXPECT_LT(s[i], s[i + 1]);
    EXPECT_EQ(resmatch::default_schedule(50), (std::vector<int>{50}));
    EXPECT_EQ(resmatch::default_max_samples(MinimalProblemKind::kUp2p), 5000);
    EXPECT_EQ(resmatch::default_max_samples(MinimalProblemKind::kP3p), 20000);
}

TEST(RunExperiment, ReproducibleAndThreadCountInvariant) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kUp2p, 8);
    cfg.sigmas = {0.0, 0.5};
    cfg.outlier_counts = {0, 2};
    cfg.instances = 4;
    cfg.schedule = {100, 300};
    cfg.solvers = {resmatch::SolverKind::kSparse, resmatch::SolverKind::kDense};
    cfg.seed = 99;

    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    cfg.threads = 3;
    const auto c = run_experiment(cfg);

    ASSERT_EQ(a.size(), 8u);  // 2 sigmas x 2 outlier counts x 2 solvers
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].curve.rows.size(), 2u);
        for (std::size_t r = 0; r < a[i].curve.rows.size(); ++r) {
            // bit-identical across runs and worker counts
            EXPECT_EQ(a[i].curve.rows[r].mean_accuracy, b[i].curve.rows[r].mean_accuracy);
            EXPECT_EQ(a[i].curve.rows[r].mean_accuracy, c[i].curve.rows[r].mean_accuracy);
            EXPECT_EQ(a[i].curve.rows[r].std_accuracy, c[i].curve.rows[r].std_accuracy);
            EXPECT_GE(a[i].curve.rows[r].mean_accuracy, 0.0);
            EXPECT_LE(a[i].curve.rows[r].mean_accuracy, 1.0);
        }
    }
}

TEST(RunExperiment, SparseBeatsDenseNoiseFree) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p);
    cfg.instances = 10;
    cfg.schedule = {20000};
    cfg.solvers = {resmatch::SolverKind::kSparse, resmatch::SolverKind::kDense};
    cfg.seed = 5;
    cfg.threads = 4;
    const auto res = run_experiment(cfg);
    ASSERT_EQ(res.size(), 2u);
    const double sparse = res[0].curve.rows.back().mean_accuracy;
    const double dense = res[1].curve.rows.back().mean_accuracy;
    EXPECT_GE(sparse, dense - 0.05);
}

TEST(RunExperiment, SmallBaselineMoreRobustToNoise) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kThreePlusOne);
    cfg.sigmas = {0.5};
    cfg.instances = 20;
    cfg.schedule = {20000};
    cfg.seed = 3;
    cfg.threads = 4;
    cfg.baseline = 1.0;
    const double small = run_experiment(cfg)[0].curve.rows.back().mean_accuracy;
    cfg.baseline = 5.0;
    const double large = run_experiment(cfg)[0].curve.rows.back().mean_accuracy;
    EXPECT_GE(small, large);
}

TEST(RunExperiment, RejectsBadConfigs) {
    ExperimentConfig cfg = base_config(MinimalProblemKind::kP3p, 3);  // n < order
    EXPECT_THROW(run_experiment(cfg), resmatch::InsufficientPointsError);
    cfg = base_config(MinimalProblemKind::kP3p);
    cfg.schedule = {200, 100};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg = base_config(MinimalProblemKind::kP3p);
    cfg.instances = 0;
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}
