#include "ctrec/tableau.hpp"

#include <vector>

#include "ctrec/errors.hpp"

namespace ctrec {

VectorXd ForecastTableau::vec_by_variable() const {
    MatrixXd t = values.transpose();
    return Eigen::Map<const VectorXd>(t.data(), t.size());
}

VectorXd ForecastTableau::vec_by_time() const { return Eigen::Map<const VectorXd>(values.data(), values.size()); }

ForecastTableau ForecastTableau::from_by_variable(const VectorXd &y, Index n, Index cols, std::string provenance) {
    if (y.size() != n * cols)
        fail(ErrorKind::DimensionMismatch, "vector length does not match tableau shape");
    ForecastTableau out;
    out.values = Eigen::Map<const MatrixXd>(y.data(), cols, n).transpose();
    out.provenance = std::move(provenance);
    return out;
}

VectorXd Permutation::apply(const VectorXd &x) const {
    if (x.size() != size())
        fail(ErrorKind::DimensionMismatch, "permutation size mismatch");
    VectorXd y(x.size());
    for (Index i = 0; i < size(); ++i)
        y(i) = x(src[static_cast<size_t>(i)]);
    return y;
}

VectorXd Permutation::apply_transpose(const VectorXd &x) const {
    if (x.size() != size())
        fail(ErrorKind::DimensionMismatch, "permutation size mismatch");
    VectorXd y(x.size());
    for (Index i = 0; i < size(); ++i)
        y(src[static_cast<size_t>(i)]) = x(i);
    return y;
}

Permutation Permutation::transpose() const {
    Permutation t;
    t.src.resize(src.size());
    for (size_t i = 0; i < src.size(); ++i)
        t.src[static_cast<size_t>(src[i])] = static_cast<Index>(i);
    return t;
}

MatrixXd Permutation::dense() const {
    MatrixXd P = MatrixXd::Zero(size(), size());
    for (Index i = 0; i < size(); ++i)
        P(i, src[static_cast<size_t>(i)]) = 1.0;
    return P;
}

SpMat Permutation::sparse() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(src.size());
    for (Index i = 0; i < size(); ++i)
        t.emplace_back(i, src[static_cast<size_t>(i)], 1.0);
    SpMat P(size(), size());
    P.setFromTriplets(t.begin(), t.end());
    return P;
}

} // namespace ctrec
