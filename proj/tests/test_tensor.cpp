#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "resmatch/simulation.hpp"
#include "resmatch/tensor.hpp"

using resmatch::EdgeTuple;
using resmatch::ExperimentConfig;
using resmatch::MinimalProblemKind;
using resmatch::ProblemInstance;
using resmatch::Rng;
using resmatch::SparseAffinityTensor;

namespace {

ProblemInstance make_p3p_instance(std::uint64_t seed, int n = 10) {
    ExperimentConfig cfg;
    cfg.kind = MinimalProblemKind::kP3p;
    cfg.n = n;
    Rng rng(seed);
    return gen_p3p_instance(cfg, rng);
}

EdgeTuple correct_edge(const ProblemInstance& inst, const std::vector<int>& rows) {
    EdgeTuple e;
    e.order = static_cast<int>(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        e.rows[k] = rows[k];
        e.cols[k] = inst.ground_truth[static_cast<std::size_t>(rows[k])];
    }
    return e;
}

}  // namespace

TEST(SampleHyperedges, DeterministicGivenSeed) {
    const auto a = resmatch::sample_hyperedges(10, 12, 4, 200, std::uint64_t{42});
    const auto b = resmatch::sample_hyperedges(10, 12, 4, 200, std::uint64_t{42});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].rows, b[i].rows);
        EXPECT_EQ(a[i].cols, b[i].cols);
    }
    const auto c = resmatch::sample_hyperedges(10, 12, 4, 200, std::uint64_t{43});
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || a[i].rows != c[i].rows || a[i].cols != c[i].cols;
    EXPECT_TRUE(any_diff);
}

TEST(SampleHyperedges, IndicesDistinctWithinTuple) {
    for (int order : {3, 4}) {
        const auto edges = resmatch::sample_hyperedges(6, 9, order, 500, std::uint64_t{7});
        ASSERT_EQ(edges.size(), 500u);
        for (const auto& e : edges) {
            std::set<int> rows(e.rows.begin(), e.rows.begin() + order);
            std::set<int> cols(e.cols.begin(), e.cols.begin() + order);
            EXPECT_EQ(static_cast<int>(rows.size()), order);
            EXPECT_EQ(static_cast<int>(cols.size()), order);
            for (int k = 0; k < order; ++k) {
                EXPECT_GE(e.rows[k], 0);
                EXPECT_LT(e.rows[k], 6);
                EXPECT_GE(e.cols[k], 0);
                EXPECT_LT(e.cols[k], 9);
            }
        }
    }
}

TEST(SampleHyperedges, TightCaseIsBijection) {
    const auto edges = resmatch::sample_hyperedges(4, 4, 4, 10, std::uint64_t{11});
    ASSERT_EQ(edges.size(), 10u);
    for (const auto& e : edges) {
        std::set<int> rows(e.rows.begin(), e.rows.end());
        std::set<int> cols(e.cols.begin(), e.cols.end());
        EXPECT_EQ(rows.size(), 4u);
        EXPECT_EQ(cols.size(), 4u);
    }
}

TEST(SampleHyperedges, ThrowsWhenTooFewPoints) {
    EXPECT_THROW(resmatch::sample_hyperedges(3, 10, 4, 5, std::uint64_t{1}),
                 resmatch::InsufficientPointsError);
    EXPECT_THROW(resmatch::sample_hyperedges(10, 2, 3, 5, std::uint64_t{1}),
                 resmatch::InsufficientPointsError);
}

TEST(EdgeAffinity, MatchesExponentialOfResultant) {
    const ProblemInstance inst = make_p3p_instance(3);
    const EdgeTuple e = correct_edge(inst, {0, 1, 2, 3});
    const auto [qs, qsp] = minimal_set_polynomials(MinimalProblemKind::kP3p, inst, e);
    const double r = resultant_magnitude_qr(sylvester(qs, qsp));
    const double rho = 0.37;
    EXPECT_NEAR(edge_affinity(MinimalProblemKind::kP3p, inst, e, rho), std::exp(-r / rho), 1e-14);

    // With rho set to the measured resultant the affinity is exactly 1/e.
    EdgeTuple wrong = e;
    std::swap(wrong.cols[2], wrong.cols[3]);
    const auto [ws, wsp] = minimal_set_polynomials(MinimalProblemKind::kP3p, inst, wrong);
    const double rw = resultant_magnitude_qr(sylvester(ws, wsp));
    ASSERT_GT(rw, 0.0);
    EXPECT_NEAR(edge_affinity(MinimalProblemKind::kP3p, inst, wrong, rw), std::exp(-1.0), 1e-12);
}

TEST(EdgeAffinity, ExactEdgeNearOne) {
    const ProblemInstance inst = make_p3p_instance(5);
    const double rho = resmatch::default_rho(MinimalProblemKind::kP3p);
    const double a =
        edge_affinity(MinimalProblemKind::kP3p, inst, correct_edge(inst, {0, 1, 2, 3}), rho);
    EXPECT_GT(a, 0.9);
    EXPECT_LE(a, 1.0);
}

TEST(EdgeAffinity, DegenerateEdgeGetsZeroNotThrow) {
    ProblemInstance inst = make_p3p_instance(9);
    inst.points3d[1] = inst.points3d[0];  // coincident 3D points
    const EdgeTuple e = correct_edge(inst, {0, 1, 2, 3});
    EXPECT_EQ(edge_affinity(MinimalProblemKind::kP3p, inst, e, 1e-12), 0.0);
}

TEST(EdgeAffinity, CorrectEdgesDominateCorruptedOnes) {
    const double rho = resmatch::default_rho(MinimalProblemKind::kP3p);
    std::vector<double> correct_vals, wrong_vals;
    Rng rng(31);
    ExperimentConfig cfg;
    cfg.kind = MinimalProblemKind::kP3p;
    cfg.n = 10;
    for (int t = 0; t < 25; ++t) {
        const ProblemInstance inst = gen_p3p_instance(cfg, rng);
        for (int s = 0; s < 10; ++s) {
            const auto rows = rng.permutation(10);
            const EdgeTuple good = correct_edge(inst, {rows[0], rows[1], rows[2], rows[3]});
            EdgeTuple bad = good;
            bad.cols[3] = inst.ground_truth[static_cast<std::size_t>(rows[4])];
            correct_vals.push_back(edge_affinity(cfg.kind, inst, good, rho));
            wrong_vals.push_back(edge_affinity(cfg.kind, inst, bad, rho));
        }
    }
    double mean_correct = 0.0, mean_wrong = 0.0;
    for (double v : correct_vals) mean_correct += v;
    for (double v : wrong_vals) mean_wrong += v;
    EXPECT_GT(mean_correct, mean_wrong);
    // Median comparison: ground-truth-consistent edges stochastically dominate.
    std::sort(correct_vals.begin(), correct_vals.end());
    std::sort(wrong_vals.begin(), wrong_vals.end());
    EXPECT_GT(correct_vals[correct_vals.size() / 2], wrong_vals[wrong_vals.size() / 2]);
}

TEST(SparseTensor, OneEntryPerDistinctSample) {
    const ProblemInstance inst = make_p3p_instance(13);
    Rng rng(17);
    const auto samples = resmatch::sample_hyperedges(10, 10, 4, 50, rng);
    const auto tensor =
        build_tensor(MinimalProblemKind::kP3p, inst, samples, resmatch::default_rho(inst.kind));
    std::set<std::array<int, 4>> distinct;
    for (const auto& e : samples) {
        std::array<int, 4> key{};
        for (int k = 0; k < 4; ++k)
            key[static_cast<std::size_t>(k)] = tensor.flatten(e.rows[k], e.cols[k]);
        std::sort(key.begin(), key.end());
        distinct.insert(key);
    }
    EXPECT_EQ(tensor.size(), distinct.size());
    for (const auto& e : tensor.entries()) {
        EXPECT_GE(e.value, 0.0);
        EXPECT_LE(e.value, 1.0);
    }
}

TEST(SparseTensor, SuperSymmetricQueries) {
    SparseAffinityTensor t(3, 4, 4);
    const int a = t.flatten(0, 1), b = t.flatten(1, 2), c = t.flatten(2, 0);
    t.add_flat(std::array<int, 3>{a, b, c}, 0.625);
    const std::array<std::array<int, 3>, 6> perms = {
        {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
    for (const auto& p : perms) EXPECT_DOUBLE_EQ(t.value(p), 0.625);
    EXPECT_DOUBLE_EQ(t.value(std::array<int, 3>{a, b, a}), 0.0);
}

TEST(SparseTensor, DuplicatesKeepMaximum) {
    SparseAffinityTensor t(3, 4, 4);
    const std::array<int, 3> idx{1, 5, 9};
    t.add_flat(idx, 0.25);
    t.add_flat(std::array<int, 3>{9, 1, 5}, 0.75);  // permuted duplicate
    t.add_flat(idx, 0.5);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_DOUBLE_EQ(t.value(idx), 0.75);
}

TEST(SparseTensor, PrefixBuildsAreNested) {
    const ProblemInstance inst = make_p3p_instance(29);
    Rng rng(23);
    const auto samples = resmatch::sample_hyperedges(10, 10, 4, 120, rng);
    std::vector<double> affinity(samples.size());
    const double rho = resmatch::default_rho(inst.kind);
    for (std::size_t i = 0; i < samples.size(); ++i)
        affinity[i] = edge_affinity(inst.kind, inst, samples[i], rho);

    resmatch::TensorBuilder builder(4, 10, 10);
    builder.extend(samples, affinity, 40);
    const auto small_entries = builder.tensor().entries();
    builder.extend(samples, affinity, 120);
    const auto& big = builder.tensor();

    // Every prefix entry appears, identically, in the longer build.
    for (const auto& e : small_entries)
        EXPECT_EQ(big.value(std::span<const int>{e.idx.data(), 4}), e.value);

    // The incremental build equals the from-scratch build of the prefix.
    const auto scratch =
        build_tensor(inst.kind, inst, std::span<const EdgeTuple>(samples.data(), 40), rho);
    ASSERT_EQ(scratch.size(), small_entries.size());
    for (std::size_t i = 0; i < scratch.size(); ++i) {
        EXPECT_EQ(scratch.entries()[i].idx, small_entries[i].idx);
        EXPECT_EQ(scratch.entries()[i].value, small_entries[i].value);
    }
}
