#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrec/crosstemporal.hpp"
#include "ctrec/hierarchy.hpp"
#include "ctrec/tableau.hpp"
#include "ctrec/temporal.hpp"

namespace ctrec {

enum class CovStructure { Identity, Diagonal, BlockDiagonal, Full };

const char *to_string(CovStructure s);

// A materialized approximation of W (or Omega). Identity, diagonal and block
// forms are held sparse; full forms dense.
struct CovarianceModel {
    std::string kind;
    CovStructure structure = CovStructure::Identity;
    SpMat sparse;
    MatrixXd dense;
    std::vector<double> lambda; // shrinkage intensities, one per shrunk block
    std::vector<double> rho;    // first-order autocorrelations per level, levels below m

    Index dim() const { return structure == CovStructure::Full ? dense.rows() : sparse.rows(); }
    MatrixXd to_dense() const;
    SpMat to_sparse() const;
    VectorXd diagonal() const;

    static CovarianceModel identity(Index n, std::string kind);
    static CovarianceModel diagonal_of(const VectorXd &d, std::string kind);
    static CovarianceModel full(MatrixXd M, std::string kind);
    static CovarianceModel block(SpMat M, std::string kind);
};

// In-sample residuals, n(k*+m) x N. Row r*n + i holds series i at per-cycle
// position r (levels descending, time within level), as in a by-time W.
struct ResidualTableau {
    enum class Ordering { ByTime, ByVariable };

    MatrixXd E;
    Index n = 0;
    Ordering ordering = Ordering::ByTime;

    Index N() const { return E.cols(); }
    void validate(const TemporalStructure &ts) const;
    // E^[k]_l, n x N.
    MatrixXd node(const TemporalStructure &ts, int level, Index l) const;
    // E^[k] = [E^[k]_1 ... E^[k]_{M_k}], n x N M_k.
    MatrixXd level(const TemporalStructure &ts, int level) const;
    // Temporal residuals of one series, (k*+m) x N.
    MatrixXd series(const TemporalStructure &ts, Index i) const;
    // The same data reordered series by series (row i (k*+m) + r).
    ResidualTableau to_by_variable(const TemporalStructure &ts) const;
    ResidualTableau to_by_time(const TemporalStructure &ts) const;
};

// (1/N) E E', uncentered.
MatrixXd sample_mse(const MatrixXd &E);

// Target-diagonal shrinkage intensity on the correlation scale, clamped to [0,1].
// E is p x N with variables in rows.
double shrinkage_intensity(const MatrixXd &E);

struct ShrinkResult {
    MatrixXd matrix;
    double lambda = 0.0;
};

// lambda T + (1 - lambda) S with T = diag(S).
MatrixXd shrink_toward_diagonal(const MatrixXd &sample, double lambda);
ShrinkResult shrink(const MatrixXd &E, std::optional<double> lambda_override = std::nullopt);

// Lag-1 uncentered autocorrelation of a sequence.
double lag1_autocorrelation(const VectorXd &s);

bool is_cs_kind(const std::string &kind);
bool is_t_kind(const std::string &kind);
bool is_oct_kind(const std::string &kind);
bool kind_needs_residuals(const std::string &kind);
std::vector<std::string> cs_kinds();
std::vector<std::string> t_kinds();
std::vector<std::string> oct_kinds(bool include_experimental = false);

// E: n x T residuals of the series at a single frequency.
CovarianceModel cross_sectional_cov(const std::string &kind, const CrossSectionalStructure &cs,
                                    const std::optional<MatrixXd> &E = std::nullopt);

// Ex: (k*+m) x N residuals of one series, rows in per-cycle order.
CovarianceModel temporal_cov(const std::string &kind, const TemporalStructure &ts,
                             const std::optional<MatrixXd> &Ex = std::nullopt);

// Per-cycle by-time W of size n(k*+m).
CovarianceModel cross_temporal_cov(const std::string &kind, const CrossSectionalStructure &cs,
                                   const TemporalStructure &ts,
                                   const std::optional<ResidualTableau> &E = std::nullopt);

// Per-cycle temporal model to the h-cycle tableau row layout (I_h (x) Omega, permuted).
CovarianceModel expand_temporal(const CovarianceModel &omega, const TemporalStructure &ts, Index h);

// Per-cycle by-time W to the by-variable, h-cycle space of vec(Y').
CovarianceModel expand_cross_temporal(const CovarianceModel &W, const CrossTemporalStructure &xts);

// Throws SingularCovariance unless symmetric positive definite.
void require_spd(const CovarianceModel &model);

} // namespace ctrec
