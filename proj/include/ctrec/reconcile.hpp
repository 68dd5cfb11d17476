#pragma once

#include <optional>
#include <string>

#include <Eigen/Cholesky>

#include "ctrec/covariance.hpp"
#include "ctrec/crosstemporal.hpp"
#include "ctrec/tableau.hpp"

namespace ctrec {

struct SolveDiagnostics {
    double condition_estimate = 1.0; // 1-norm estimate for H'WH
    std::string factorization = "LLT";
    bool ill_conditioned = false;    // condition estimate above 1e12
};

struct ProjectionResult {
    VectorXd reconciled;
    VectorXd adjustment;       // y_hat - y_tilde
    VectorXd coherency_errors; // d = -H'y_hat (empty for the structural form)
    VectorXd beta;             // bottom estimates (structural form only)
    SolveDiagnostics diagnostics;
};

// Projection onto {y : H'y = 0} in the W^{-1} metric with a reusable factorization of H'WH.
class Projector {
public:
    Projector(const SpMat &Ht, const CovarianceModel &W);

    Index dim() const { return Ht_.cols(); }
    VectorXd apply(const VectorXd &y) const;
    // Each column is an independent vector.
    MatrixXd apply_columns(const MatrixXd &Y) const;
    // I - W H (H'WH)^{-1} H'.
    MatrixXd matrix() const;
    // M W, only available for dense W.
    std::optional<MatrixXd> reconciled_covariance() const;
    const SolveDiagnostics &diagnostics() const { return diag_; }
    const SpMat &kernel() const { return Ht_; }

private:
    SpMat Ht_;
    bool dense_w_ = false;
    SpMat WH_sparse_;
    MatrixXd WH_dense_;
    MatrixXd W_dense_;
    Eigen::LLT<MatrixXd> llt_;
    SolveDiagnostics diag_;

    VectorXd correction(const VectorXd &lambda) const;
};

ProjectionResult project(const VectorXd &y_hat, const CovarianceModel &W, const SpMat &Ht);
ProjectionResult project(const VectorXd &y_hat, const CovarianceModel &W, const MatrixXd &Ht);

// GLS form: y_tilde = S (S'W^{-1}S)^{-1} S'W^{-1} y_hat.
ProjectionResult project_structural(const VectorXd &y_hat, const CovarianceModel &W, const SpMat &S);
ProjectionResult project_structural(const VectorXd &y_hat, const CovarianceModel &W, const MatrixXd &S);

struct ReconciliationResult {
    ForecastTableau reconciled;
    MatrixXd adjustment;
    VectorXd coherency_errors_before;
    SolveDiagnostics diagnostics;
    std::optional<MatrixXd> reconciled_covariance;
};

// Column-by-column cross-sectional projection, one n x n model for every column.
MatrixXd reconcile_cross_sectional(const MatrixXd &Y_hat, const CrossSectionalStructure &cs,
                                   const CovarianceModel &W);

// Level-by-level cross-sectional projection of a tableau with one model per temporal level.
MatrixXd reconcile_cross_sectional_levels(const MatrixXd &Y_hat, const CrossSectionalStructure &cs,
                                          const TemporalStructure &ts, Index h,
                                          const std::vector<CovarianceModel> &per_level);

// Row-by-row temporal projection; `per_series` holds one per-cycle model, shared or one per row.
MatrixXd reconcile_temporal(const MatrixXd &Y_hat, const TemporalStructure &ts, Index h,
                            const std::vector<CovarianceModel> &per_series);

// One global projection on vec(Y_hat') with a per-cycle by-time model W.
ReconciliationResult reconcile_cross_temporal(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                              const CovarianceModel &W);
// Same solution computed on vec(Y_hat) with W directly and kernel H'P.
ReconciliationResult reconcile_cross_temporal_by_time(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                                      const CovarianceModel &W);
// Same solution through the structural representation Q S_check.
ReconciliationResult reconcile_cross_temporal_structural(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                                         const CovarianceModel &W);

// Method dispatch by name: bu, cs-<kind>, t-<kind>, oct-<kind>.
// For cs kinds the tableau is reconciled level by level with W^[k] estimated on level-k residuals.
ReconciliationResult reconcile_method(const std::string &method, const MatrixXd &Y_hat,
                                      const CrossTemporalStructure &xts,
                                      const std::optional<ResidualTableau> &residuals = std::nullopt);

std::vector<CovarianceModel> per_level_cs_models(const std::string &kind, const CrossSectionalStructure &cs,
                                                 const TemporalStructure &ts,
                                                 const std::optional<ResidualTableau> &residuals);
std::vector<CovarianceModel> per_series_t_models(const std::string &kind, const TemporalStructure &ts, Index n,
                                                 const std::optional<ResidualTableau> &residuals);

} // namespace ctrec
