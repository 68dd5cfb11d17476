#pragma once

#include <random>

#include <Eigen/Dense>

#include "ctrec/crosstemporal.hpp"
#include "ctrec/hierarchy.hpp"
#include "ctrec/temporal.hpp"

namespace testing {

using ctrec::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double max_abs(const MatrixXd &A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_diff(const MatrixXd &A, const MatrixXd &B) {
    return (A - B).cwiseAbs().maxCoeff() / (1.0 + std::max(max_abs(A), max_abs(B)));
}

// argmin (y - y_hat)' W^{-1} (y - y_hat) subject to Ht y = 0, from the full KKT system.
inline VectorXd kkt_oracle(const VectorXd &y_hat, const MatrixXd &W, const MatrixXd &Ht) {
    const Index n = y_hat.size(), r = Ht.rows();
    const MatrixXd Winv = W.inverse();
    MatrixXd K = MatrixXd::Zero(n + r, n + r);
    K.topLeftCorner(n, n) = Winv;
    K.topRightCorner(n, r) = Ht.transpose();
    K.bottomLeftCorner(r, n) = Ht;
    VectorXd rhs = VectorXd::Zero(n + r);
    rhs.head(n) = Winv * y_hat;
    return Eigen::FullPivLU<MatrixXd>(K).solve(rhs).head(n);
}

inline MatrixXd random_normal(std::mt19937_64 &rng, Index r, Index c, double sd = 1.0) {
    std::normal_distribution<double> z(0.0, sd);
    MatrixXd M(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j)
            M(i, j) = z(rng);
    return M;
}

inline MatrixXd random_spd(std::mt19937_64 &rng, Index n) {
    const MatrixXd A = random_normal(rng, n, n);
    return A * A.transpose() + static_cast<double>(n) * MatrixXd::Identity(n, n);
}

// 0/1 aggregation matrix whose rows each sum at least two bottoms.
inline MatrixXd random_agg(std::mt19937_64 &rng, Index n_a, Index n_b) {
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<Index> pick(0, n_b - 1);
    MatrixXd C = MatrixXd::Zero(n_a, n_b);
    for (Index a = 0; a < n_a; ++a) {
        for (Index b = 0; b < n_b; ++b)
            C(a, b) = coin(rng) ? 1.0 : 0.0;
        while (C.row(a).sum() < 2.0)
            C(a, pick(rng)) = 1.0;
    }
    return C;
}

inline ctrec::CrossSectionalStructure toy_cs() {
    MatrixXd C(1, 2);
    C << 1, 1;
    return ctrec::build_cross_sectional(C, {"X", "W", "Z"});
}

} // namespace testing
