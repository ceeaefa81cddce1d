#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "resmatch/errors.hpp"

namespace resmatch {

// A leading coefficient below this (after unit normalization) marks the
// polynomial degenerate. Degenerate polynomials zero out the owning
// hyper-edge instead of being deflated to a lower degree.
inline constexpr double kDegenerateLeadingTol = 1e-12;

// Resultant magnitudes of unit-norm coefficient vectors below this count as
// "shares a root"; double-precision QR on the 8x8 matrices used here carries
// roughly 1e-14 relative error, which leaves margin for coefficient noise.
inline constexpr double kZeroResultantTol = 1e-8;

// Univariate real polynomial, coefficients stored by descending degree
// (a_n, ..., a_0).
class Polynomial {
  public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
    }
    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    bool degenerate() const { return degenerate_; }
    void mark_degenerate() { degenerate_ = true; }

  private:
    std::vector<double> coeffs_;
    bool degenerate_ = false;
};

// Scales the coefficient vector to unit Euclidean norm. The degree is never
// deflated: a vanishing leading coefficient marks the result degenerate.
inline Polynomial normalize(const Polynomial& p) {
    double sq = 0.0;
    for (double c : p.coeffs()) sq += c * c;
    if (sq == 0.0) throw ZeroPolynomialError{};
    const double inv = 1.0 / std::sqrt(sq);
    std::vector<double> scaled = p.coeffs();
    for (double& c : scaled) c *= inv;
    Polynomial out(std::move(scaled));
    if (std::abs(out.coeffs().front()) < kDegenerateLeadingTol) out.mark_degenerate();
    return out;
}

// Horner evaluation.
inline double eval(const Polynomial& p, double x) {
    double r = 0.0;
    for (double c : p.coeffs()) r = r * x + c;
    return r;
}

// 2n x 2n Sylvester matrix of two degree-n polynomials; rank deficiency
// signals a common root. Top n rows hold the first polynomial's coefficients
// shifted right row by row, bottom n rows likewise for the second.
struct SylvesterMatrix {
    Eigen::MatrixXd entries;
    int n = 0;  // common (padded) degree
};

// Unequal degrees are padded with zero leading coefficients so the matrix
// stays square at twice the larger degree.
inline SylvesterMatrix sylvester(const Polynomial& p, const Polynomial& q) {
    const int n = std::max(p.degree(), q.degree());
    if (n < 1) throw DegreeTooLowError{};
    const auto padded = [n](const Polynomial& r) {
        std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
        std::copy(r.coeffs().begin(), r.coeffs().end(), c.begin() + (n - r.degree()));
        return c;
    };
    const std::vector<double> a = padded(p);
    const std::vector<double> b = padded(q);
    SylvesterMatrix m;
    m.n = n;
    m.entries = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int row = 0; row < n; ++row) {
        for (int k = 0; k <= n; ++k) {
            m.entries(row, row + k) = a[static_cast<std::size_t>(k)];
            m.entries(n + row, row + k) = b[static_cast<std::size_t>(k)];
        }
    }
    return m;
}

// |R_{2n,2n}| of a QR factorization of M; ~0 iff the source polynomials share
// a root. Default backend: cheaper than the SVD at the same zero set.
inline double resultant_magnitude_qr(const SylvesterMatrix& m) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.entries);
    const Eigen::Index last = m.entries.rows() - 1;
    return std::abs(qr.matrixQR()(last, last));
}

// Smallest singular value of M.
inline double resultant_magnitude_svd(const SylvesterMatrix& m) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.entries);
    return svd.singularValues()(m.entries.rows() - 1);
}

enum class ResultantBackend { kQr, kSvd };

inline double resultant_magnitude(const Polynomial& p, const Polynomial& q,
                                  ResultantBackend backend = ResultantBackend::kQr) {
    const SylvesterMatrix m = sylvester(p, q);
    return backend == ResultantBackend::kQr ? resultant_magnitude_qr(m) : resultant_magnitude_svd(m);
}

}  // namespace resmatch
