#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "resmatch/errors.hpp"
#include "resmatch/rng.hpp"
#include "resmatch/tensor.hpp"

namespace resmatch {

// N x N' assignment. Soft matrices are nonnegative reals (unit global l2 norm
// from the dense solver, unit row sums from the sparse one); hard matrices
// are 0/1 with at most one 1 per row and column.
struct AssignmentMatrix {
    Eigen::MatrixXd values;
    bool hard = false;
};

inline AssignmentMatrix uniform_assignment(int n_rows, int n_cols) {
    AssignmentMatrix x;
    x.values = Eigen::MatrixXd::Constant(
        n_rows, n_cols, 1.0 / std::sqrt(static_cast<double>(n_rows) * static_cast<double>(n_cols)));
    return x;
}

// Seedable strictly positive start, unit global l2 norm.
inline AssignmentMatrix random_assignment(int n_rows, int n_cols, Rng& rng) {
    AssignmentMatrix x;
    x.values.resize(n_rows, n_cols);
    for (int c = 0; c < n_cols; ++c)
        for (int r = 0; r < n_rows; ++r) x.values(r, c) = rng.uniform(0.5, 1.5);
    x.values /= x.values.norm();
    return x;
}

namespace detail {

inline constexpr double kFactorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};

inline bool all_distinct(const std::array<int, 4>& idx, int d) {
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (idx[i] == idx[j]) return false;
    return true;
}

// out[i] = sum over all permutation-expanded tensor entries with first index
// i of value * prod of v over the remaining indices. Exact for entries with
// repeated indices (the multiset permutation count replaces (d-1)!).
inline void contract_all_but_one(const SparseAffinityTensor& h, const Eigen::VectorXd& v,
                                 Eigen::VectorXd& out) {
    out.setZero();
    const int d = h.order();
    for (const auto& e : h.entries()) {
        if (e.value == 0.0) continue;
        const auto& idx = e.idx;
        if (all_distinct(idx, d)) {
            const double w = e.value * kFactorial[d - 1];
            for (int k = 0; k < d; ++k) {
                double prod = w;
                for (int j = 0; j < d; ++j)
                    if (j != k) prod *= v[idx[j]];
                out[idx[k]] += prod;
            }
        } else {
            for (int k = 0; k < d; ++k) {
                bool first = true;
                for (int j = 0; j < k; ++j)
                    if (idx[j] == idx[k]) { first = false; break; }
                if (!first) continue;
                double prod = 1.0;
                double denom = 1.0;
                for (int j = 0; j < d; ++j) {
                    if (j == k) continue;
                    prod *= v[idx[j]];
                    int run = 1;
                    for (int j2 = 0; j2 < j; ++j2)
                        if (j2 != k && idx[j2] == idx[j]) ++run;
                    denom *= run;
                }
                out[idx[k]] += e.value * (kFactorial[d - 1] / denom) * prod;
            }
        }
    }
}

}  // namespace detail

// Matching score: the full super-symmetric sum of entry value times the
// product of assignment values over the entry's indices.
inline double tensor_score(const SparseAffinityTensor& h, const AssignmentMatrix& x) {
    const Eigen::Map<const Eigen::VectorXd> v(x.values.data(), x.values.size());
    const int d = h.order();
    double score = 0.0;
    for (const auto& e : h.entries()) {
        if (e.value == 0.0) continue;
        double prod = 1.0;
        double denom = 1.0;
        for (int j = 0; j < d; ++j) {
            prod *= v[e.idx[j]];
            int run = 1;
            for (int j2 = 0; j2 < j; ++j2)
                if (e.idx[j2] == e.idx[j]) ++run;
            denom *= run;
        }
        score += e.value * (detail::kFactorial[d] / denom) * prod;
    }
    return score;
}

// Tensor power iteration with global l2 normalization. Starts from a strictly
// positive x0 and stops when the iterate moves less than `tol` or after
// `max_iters` rounds.
inline AssignmentMatrix power_iteration_dense(const SparseAffinityTensor& h,
                                              const AssignmentMatrix& x0, int max_iters = 100,
                                              double tol = 1e-10) {
    if (!h.has_positive_entry()) throw EmptyTensorError{};
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x0.values.data(), x0.values.size());
    v /= v.norm();
    Eigen::VectorXd next(v.size());
    for (int it = 0; it < max_iters; ++it) {
        detail::contract_all_but_one(h, v, next);
        const double nrm = next.norm();
        if (nrm == 0.0) break;
        next /= nrm;
        const double delta = (next - v).norm();
        v = next;
        if (delta < tol) break;
    }
    AssignmentMatrix out;
    out.values = Eigen::Map<const Eigen::MatrixXd>(v.data(), h.n_rows(), h.n_cols());
    return out;
}

// Row-l1 variant: the square-root reparametrization X = Y o Y turns unit row
// sums of X into unit row l2 norms of Y. Each round contracts against X,
// multiplies elementwise into Y and renormalizes the rows; rows without
// tensor support keep their previous values. Output rows sum to 1 and are
// empirically much closer to boolean than the dense solver's.
inline AssignmentMatrix power_iteration_sparse(const SparseAffinityTensor& h,
                                               const AssignmentMatrix& x0, int max_iters = 100,
                                               double tol = 1e-10) {
    if (!h.has_positive_entry()) throw EmptyTensorError{};
    const int n = h.n_rows(), m = h.n_cols();
    Eigen::MatrixXd y = x0.values.cwiseSqrt();
    for (int r = 0; r < n; ++r) y.row(r) /= y.row(r).norm();
    Eigen::VectorXd contracted(n * m);
    Eigen::MatrixXd x(n, m), next(n, m);
    for (int it = 0; it < max_iters; ++it) {
        x = y.cwiseProduct(y);
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
        detail::contract_all_but_one(h, xv, contracted);
        next = y.cwiseProduct(Eigen::Map<const Eigen::MatrixXd>(contracted.data(), n, m));
        for (int r = 0; r < n; ++r) {
            const double nrm = next.row(r).norm();
            if (nrm > 0.0)
                next.row(r) /= nrm;
            else
                next.row(r) = y.row(r);
        }
        const double delta = (next - y).norm();
        y.swap(next);
        if (delta < tol) break;
    }
    AssignmentMatrix out;
    out.values = y.cwiseProduct(y);
    return out;
}

// Greedy rounding: repeatedly fix the globally largest remaining value and
// eliminate its row and column; min(N, N') picks. Ties go to the lowest
// (row, column) pair.
inline AssignmentMatrix discretize(const AssignmentMatrix& soft) {
    const int n = static_cast<int>(soft.values.rows());
    const int m = static_cast<int>(soft.values.cols());
    AssignmentMatrix out;
    out.values = Eigen::MatrixXd::Zero(n, m);
    out.hard = true;
    std::vector<bool> row_used(static_cast<std::size_t>(n), false);
    std::vector<bool> col_used(static_cast<std::size_t>(m), false);
    const int picks = std::min(n, m);
    for (int p = 0; p < picks; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        int br = -1, bc = -1;
        for (int r = 0; r < n; ++r) {
            if (row_used[static_cast<std::size_t>(r)]) continue;
            for (int c = 0; c < m; ++c) {
                if (col_used[static_cast<std::size_t>(c)]) continue;
                if (soft.values(r, c) > best) {
                    best = soft.values(r, c);
                    br = r;
                    bc = c;
                }
            }
        }
        out.values(br, bc) = 1.0;
        row_used[static_cast<std::size_t>(br)] = true;
        col_used[static_cast<std::size_t>(bc)] = true;
    }
    return out;
}

// Fraction of inlier rows assigned to their ground-truth column.
inline double accuracy(const AssignmentMatrix& hard, const std::vector<int>& ground_truth,
                       int n_inliers) {
    int correct = 0;
    for (int i = 0; i < n_inliers; ++i)
        if (hard.values(i, ground_truth[static_cast<std::size_t>(i)]) == 1.0) ++correct;
    return static_cast<double>(correct) / static_cast<double>(n_inliers);
}

}  // namespace resmatch
