#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace ctrec {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// n x h(k*+m) forecasts, column blocks [level m | ... | level 1], time order within a level.
struct ForecastTableau {
    MatrixXd values;
    std::string provenance = "base";

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
    // vec(Y'): series by series.
    VectorXd vec_by_variable() const;
    // vec(Y): column by column.
    VectorXd vec_by_time() const;
    static ForecastTableau from_by_variable(const VectorXd &y, Index n, Index cols, std::string provenance);
};

// Row permutation stored as an index map: (P x)[i] = x[src[i]].
struct Permutation {
    std::vector<Index> src;

    Index size() const { return static_cast<Index>(src.size()); }
    VectorXd apply(const VectorXd &x) const;
    VectorXd apply_transpose(const VectorXd &x) const;
    Permutation transpose() const;
    MatrixXd dense() const;
    SpMat sparse() const;
};

} // namespace ctrec
