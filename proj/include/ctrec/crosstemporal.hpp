#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrec/hierarchy.hpp"
#include "ctrec/tableau.hpp"
#include "ctrec/temporal.hpp"

namespace ctrec {

// C_{r,c}: maps vec(X) to vec(X') for an r x c matrix X.
Permutation commutation_matrix(Index r, Index c);

struct CrossTemporalStructure {
    std::optional<CrossSectionalStructure> cs; // absent on the raw-constraint path
    TemporalStructure ts;
    Index h = 1;
    Index n = 0;
    std::vector<std::string> labels;

    SpMat kernel_redundant; // H_breve', empty on the raw path
    SpMat kernel;           // full row-rank H'
    Permutation commutation; // P vec(Y) = vec(Y')
    Permutation struct_perm; // y = Q y_check
    SpMat struct_summing;    // S_check
    SpMat struct_agg;        // C_check
    bool raw = false;

    Index cols() const { return h * ts.total(); }     // tableau columns
    Index dim() const { return n * cols(); }
    Index lf_cols() const { return h * ts.k_star; }
    Index hf_cols() const { return h * ts.m; }
    Index expected_rank() const;
    const CrossSectionalStructure &cross_sectional() const;
    bool structural() const { return !raw; }
};

CrossTemporalStructure build_cross_temporal(const CrossSectionalStructure &cs, const TemporalStructure &ts,
                                            Index h = 1);

// User-supplied kernel acting on vec(Y'); must have full row rank. Disables the structural path.
CrossTemporalStructure build_cross_temporal_raw(const MatrixXd &kernel, Index n, const TemporalStructure &ts, Index h,
                                                std::vector<std::string> labels = {});

// Numerical rank via column-pivoted QR with a relative threshold.
Index numerical_rank(const MatrixXd &A, double rel_tol = 1e-9);

// Matrix-product form: [[C B K', C B], [B K', B]].
ForecastTableau bottom_up(const MatrixXd &B_hf, const CrossTemporalStructure &xts);
// Structural form: Q S_check vec(B'), reshaped.
ForecastTableau bottom_up_structural(const MatrixXd &B_hf, const CrossTemporalStructure &xts);

// High-frequency bottom block of a tableau, n_b x h m.
MatrixXd hf_bottom(const MatrixXd &Y, const CrossTemporalStructure &xts);

struct CoherenceReport {
    double d_cs = 0.0;   // sum |U'Y|
    double d_te = 0.0;   // sum |Z_h' Y'|
    double max_cs = 0.0; // max |U'Y|
    double max_te = 0.0; // max |Z_h' Y'|
};

CoherenceReport coherence_report(const MatrixXd &Y, const CrossTemporalStructure &xts);
CoherenceReport coherence_report(const MatrixXd &Y, const CrossSectionalStructure &cs, const TemporalStructure &ts,
                                 Index h);

// max |H'y| for any structure, including the raw path.
double kernel_violation(const MatrixXd &Y, const CrossTemporalStructure &xts);

} // namespace ctrec
