#include "ctrec/hierarchy.hpp"

#include <cmath>
#include <set>

#include "ctrec/errors.hpp"

namespace ctrec {

namespace {

bool is_integer_matrix(const MatrixXd &C) {
    for (Index j = 0; j < C.cols(); ++j)
        for (Index i = 0; i < C.rows(); ++i)
            if (C(i, j) != std::round(C(i, j)))
                return false;
    return true;
}

} // namespace

bool CrossSectionalStructure::integer_valued() const { return is_integer_matrix(agg_matrix); }

std::vector<std::string> default_labels(Index n_a, Index n_b) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(n_a + n_b));
    for (Index i = 0; i < n_a; ++i)
        out.push_back("T" + std::to_string(i + 1));
    for (Index i = 0; i < n_b; ++i)
        out.push_back("B" + std::to_string(i + 1));
    return out;
}

CrossSectionalStructure build_cross_sectional(const MatrixXd &C, std::vector<std::string> labels) {
    if (C.rows() == 0 || C.cols() == 0)
        fail(ErrorKind::InvalidInput, "aggregation matrix is empty");
    if (!C.allFinite())
        fail(ErrorKind::InvalidEntry, "aggregation matrix has NaN or infinite entries");
    const Index n_a = C.rows();
    const Index n_b = C.cols();
    if (static_cast<Index>(labels.size()) != n_a + n_b)
        fail(ErrorKind::DimensionMismatch, "expected " + std::to_string(n_a + n_b) + " labels, got " +
                                               std::to_string(labels.size()));
    std::set<std::string> seen;
    for (const auto &l : labels)
        if (!seen.insert(l).second)
            fail(ErrorKind::InvalidInput, "duplicate series label '" + l + "'");

    CrossSectionalStructure cs;
    cs.n_a = n_a;
    cs.n_b = n_b;
    cs.agg_matrix = C;
    cs.summing_matrix.resize(n_a + n_b, n_b);
    cs.summing_matrix << C, MatrixXd::Identity(n_b, n_b);
    cs.kernel.resize(n_a, n_a + n_b);
    cs.kernel << MatrixXd::Identity(n_a, n_a), -C;
    cs.labels = std::move(labels);
    return cs;
}

DeduplicationResult deduplicate_nodes(const MatrixXd &C, const std::vector<std::string> &labels) {
    const Index n_a = C.rows();
    const Index n_b = C.cols();
    if (static_cast<Index>(labels.size()) != n_a + n_b)
        fail(ErrorKind::DimensionMismatch, "labels do not match aggregation matrix");
    const double tol = is_integer_matrix(C) ? 0.0 : 1e-12;

    std::vector<Index> keep;
    DeduplicationResult out;
    for (Index i = 0; i < n_a; ++i) {
        Index nonzero = 0;
        bool unit = false;
        for (Index j = 0; j < n_b; ++j) {
            if (std::abs(C(i, j)) > tol) {
                ++nonzero;
                unit = std::abs(C(i, j) - 1.0) <= tol;
            }
        }
        if (nonzero == 1 && unit)
            out.removed.push_back(labels[static_cast<size_t>(i)]);
        else
            keep.push_back(i);
    }

    out.agg_matrix.resize(static_cast<Index>(keep.size()), n_b);
    for (size_t r = 0; r < keep.size(); ++r) {
        out.agg_matrix.row(static_cast<Index>(r)) = C.row(keep[r]);
        out.labels.push_back(labels[static_cast<size_t>(keep[r])]);
    }
    for (Index j = 0; j < n_b; ++j)
        out.labels.push_back(labels[static_cast<size_t>(n_a + j)]);
    return out;
}

bool coherent_subspace_check(const MatrixXd &Y, const CrossSectionalStructure &cs, double tol) {
    if (Y.rows() != cs.n())
        fail(ErrorKind::DimensionMismatch, "Y has " + std::to_string(Y.rows()) + " rows, structure has " +
                                               std::to_string(cs.n()) + " series");
    if (Y.size() == 0)
        return true;
    const double scale = 1.0 + Y.cwiseAbs().maxCoeff();
    return (cs.kernel * Y).cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace ctrec
