#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctrec {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Cross-sectional (contemporaneous) structure: n_a upper series obtained from
// n_b bottom series through the aggregation matrix C.
struct CrossSectionalStructure {
    Index n_a = 0;
    Index n_b = 0;
    MatrixXd agg_matrix;     // C, n_a x n_b
    MatrixXd summing_matrix; // S = [C; I], n x n_b
    MatrixXd kernel;         // U' = [I | -C], n_a x n
    std::vector<std::string> labels;

    Index n() const { return n_a + n_b; }
    bool integer_valued() const;
};

CrossSectionalStructure build_cross_sectional(const MatrixXd &C, std::vector<std::string> labels);

// Labels "T1..", "B1.." for callers that have no names.
std::vector<std::string> default_labels(Index n_a, Index n_b);

struct DeduplicationResult {
    MatrixXd agg_matrix;
    std::vector<std::string> labels;
    std::vector<std::string> removed;
};

// Drops upper rows that merely copy one bottom series (a single nonzero equal to 1).
DeduplicationResult deduplicate_nodes(const MatrixXd &C, const std::vector<std::string> &labels);

bool coherent_subspace_check(const MatrixXd &Y, const CrossSectionalStructure &cs, double tol);

} // namespace ctrec
