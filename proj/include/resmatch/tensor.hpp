#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resmatch/errors.hpp"
#include "resmatch/instance.hpp"
#include "resmatch/minimal_problems.hpp"
#include "resmatch/polynomial.hpp"
#include "resmatch/rng.hpp"

namespace resmatch {

// Ordered tuple of candidate correspondences rows[k] <-> cols[k]. Row indices
// are pairwise distinct, as are column indices; only the first `order`
// entries are meaningful.
struct EdgeTuple {
    int order = 0;
    std::array<int, 4> rows{{-1, -1, -1, -1}};
    std::array<int, 4> cols{{-1, -1, -1, -1}};
};

struct HyperEdge {
    EdgeTuple tuple;
    double affinity = 0.0;  // exp(-resultant/rho), in [0, 1]
};

// `count` tuples drawn uniformly with replacement from the space of order-k
// tuples with distinct row and distinct column indices.
inline std::vector<EdgeTuple> sample_hyperedges(int n_rows, int n_cols, int order, int count,
                                                Rng& rng) {
    if (order != 3 && order != 4) throw std::invalid_argument("hyper-edge order must be 3 or 4");
    if (n_rows < order || n_cols < order) throw InsufficientPointsError{};
    std::vector<EdgeTuple> out;
    out.reserve(count > 0 ? static_cast<std::size_t>(count) : 0);
    std::vector<int> row_pool(static_cast<std::size_t>(n_rows));
    std::vector<int> col_pool(static_cast<std::size_t>(n_cols));
    for (int s = 0; s < count; ++s) {
        std::iota(row_pool.begin(), row_pool.end(), 0);
        std::iota(col_pool.begin(), col_pool.end(), 0);
        EdgeTuple e;
        e.order = order;
        for (int k = 0; k < order; ++k) {
            std::swap(row_pool[k], row_pool[k + rng.uniform_int(n_rows - k)]);
            std::swap(col_pool[k], col_pool[k + rng.uniform_int(n_cols - k)]);
            e.rows[k] = row_pool[k];
            e.cols[k] = col_pool[k];
        }
        out.push_back(e);
    }
    return out;
}

inline std::vector<EdgeTuple> sample_hyperedges(int n_rows, int n_cols, int order, int count,
                                                std::uint64_t seed) {
    Rng rng(seed);
    return sample_hyperedges(n_rows, n_cols, order, count, rng);
}

// The two overlapping minimal-set polynomials of a hyper-edge, unit-norm.
// The retained correspondences sit in the first slots of both sets:
// order 4 pairs slots (0,1,2) with (0,1,3); order 3 pairs (0,1) with (0,2).
inline std::pair<Polynomial, Polynomial> minimal_set_polynomials(MinimalProblemKind kind,
                                                                 const ProblemInstance& inst,
                                                                 const EdgeTuple& edge) {
    switch (kind) {
        case MinimalProblemKind::kP3p: {
            const auto& pts = inst.points3d;
            const auto& obs = inst.observations.front();
            const Intrinsics& k = inst.cameras.front().intrinsics;
            return {p3p_quartic(pts[edge.rows[0]], pts[edge.rows[1]], pts[edge.rows[2]],
                                obs[edge.cols[0]], obs[edge.cols[1]], obs[edge.cols[2]], k),
                    p3p_quartic(pts[edge.rows[0]], pts[edge.rows[1]], pts[edge.rows[3]],
                                obs[edge.cols[0]], obs[edge.cols[1]], obs[edge.cols[3]], k)};
        }
        case MinimalProblemKind::kThreePlusOne: {
            const auto& v1 = inst.observations[0];
            const auto& v2 = inst.observations[1];
            const Intrinsics& k = inst.cameras.front().intrinsics;
            return {three_plus_one_quartic(v1[edge.rows[0]], v1[edge.rows[1]], v1[edge.rows[2]],
                                           v2[edge.cols[0]], v2[edge.cols[1]], v2[edge.cols[2]], k),
                    three_plus_one_quartic(v1[edge.rows[0]], v1[edge.rows[1]], v1[edge.rows[3]],
                                           v2[edge.cols[0]], v2[edge.cols[1]], v2[edge.cols[3]], k)};
        }
        case MinimalProblemKind::kUp2p: {
            const auto& pts = inst.points3d;
            const auto& obs = inst.observations.front();
            const Intrinsics& k = inst.cameras.front().intrinsics;
            return {up2p_quadratic(pts[edge.rows[0]], pts[edge.rows[1]], obs[edge.cols[0]],
                                   obs[edge.cols[1]], k),
                    up2p_quadratic(pts[edge.rows[0]], pts[edge.rows[2]], obs[edge.cols[0]],
                                   obs[edge.cols[2]], k)};
        }
    }
    throw std::invalid_argument("unknown problem kind");
}

// Affinity of one hyper-edge: exp(-|M(q_S, q_S')|/rho) with the resultant
// magnitude from the QR backend. Degenerate configurations yield affinity 0
// instead of throwing, so random sampling never aborts a tensor build.
inline double edge_affinity(MinimalProblemKind kind, const ProblemInstance& inst,
                            const EdgeTuple& edge, double rho) {
    try {
        const auto [qs, qsp] = minimal_set_polynomials(kind, inst, edge);
        if (qs.degenerate() || qsp.degenerate()) return 0.0;
        return std::exp(-resultant_magnitude_qr(sylvester(qs, qsp)) / rho);
    } catch (const DegenerateConfigurationError&) {
        return 0.0;
    }
}

inline HyperEdge score_hyperedge(MinimalProblemKind kind, const ProblemInstance& inst,
                                 const EdgeTuple& edge, double rho) {
    return {edge, edge_affinity(kind, inst, edge, rho)};
}

// Super-symmetric sparse tensor over the flattened correspondence space,
// flat index = row + col * n_rows (column-major vec of the assignment
// matrix). Entries are stored once under a sorted canonical index tuple;
// queries and contractions treat every permutation as present with the same
// value. Duplicate tuples keep the maximum value.
class SparseAffinityTensor {
  public:
    struct Entry {
        std::array<int, 4> idx{{-1, -1, -1, -1}};  // sorted; trailing -1 unused
        double value = 0.0;
    };

    SparseAffinityTensor(int order, int n_rows, int n_cols)
        : order_(order), n_rows_(n_rows), n_cols_(n_cols) {}

    int order() const { return order_; }
    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }
    int dim() const { return n_rows_ * n_cols_; }
    int flatten(int row, int col) const { return row + col * n_rows_; }

    void add_flat(std::span<const int> flat, double value) {
        const std::array<int, 4> key = canonical(flat);
        auto [it, inserted] = index_.try_emplace(key, entries_.size());
        if (inserted)
            entries_.push_back({key, value});
        else
            entries_[it->second].value = std::max(entries_[it->second].value, value);
        max_value_ = std::max(max_value_, value);
    }

    void add(const EdgeTuple& edge, double value) {
        std::array<int, 4> flat{};
        for (int k = 0; k < edge.order; ++k) flat[k] = flatten(edge.rows[k], edge.cols[k]);
        add_flat({flat.data(), static_cast<std::size_t>(edge.order)}, value);
    }

    void add(const HyperEdge& edge) { add(edge.tuple, edge.affinity); }

    // Value under any permutation of a stored tuple; 0 when absent.
    double value(std::span<const int> flat) const {
        const auto it = index_.find(canonical(flat));
        return it == index_.end() ? 0.0 : entries_[it->second].value;
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool has_positive_entry() const { return max_value_ > 0.0; }

  private:
    struct KeyHash {
        std::size_t operator()(const std::array<int, 4>& k) const {
            std::uint64_t h = 0x2545f4914f6cdd1dULL;
            for (int v : k) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
            return static_cast<std::size_t>(h);
        }
    };

    std::array<int, 4> canonical(std::span<const int> flat) const {
        std::array<int, 4> key{{-1, -1, -1, -1}};
        std::copy(flat.begin(), flat.end(), key.begin());
        std::sort(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(flat.size()));
        return key;
    }

    int order_;
    int n_rows_;
    int n_cols_;
    double max_value_ = 0.0;
    std::vector<Entry> entries_;
    std::unordered_map<std::array<int, 4>, std::size_t, KeyHash> index_;
};

// Incremental assembly in sample order. Extending to a larger prefix is
// equivalent to rebuilding from scratch, which is what makes the
// accuracy-vs-samples curves cheap: one pass over the largest sample set
// serves every prefix size.
class TensorBuilder {
  public:
    TensorBuilder(int order, int n_rows, int n_cols) : tensor_(order, n_rows, n_cols) {}

    void extend(std::span<const EdgeTuple> samples, std::span<const double> affinities,
                std::size_t upto) {
        for (; consumed_ < upto && consumed_ < samples.size(); ++consumed_)
            tensor_.add(samples[consumed_], affinities[consumed_]);
    }

    const SparseAffinityTensor& tensor() const { return tensor_; }
    std::size_t consumed() const { return consumed_; }

  private:
    SparseAffinityTensor tensor_;
    std::size_t consumed_ = 0;
};

inline SparseAffinityTensor build_tensor(MinimalProblemKind kind, const ProblemInstance& inst,
                                         std::span<const EdgeTuple> samples, double rho) {
    SparseAffinityTensor tensor(hyper_edge_order(kind), inst.num_rows(), inst.num_cols());
    for (const EdgeTuple& e : samples) tensor.add(score_hyperedge(kind, inst, e, rho));
    return tensor;
}

}  // namespace resmatch
