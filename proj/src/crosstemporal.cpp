#include "ctrec/crosstemporal.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include "ctrec/errors.hpp"

namespace ctrec {

namespace {

SpMat identity(Index n) {
    SpMat I(n, n);
    I.setIdentity();
    return I;
}

SpMat vstack(const SpMat &A, const SpMat &B) {
    if (A.cols() != B.cols())
        fail(ErrorKind::DimensionMismatch, "vstack column mismatch");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<size_t>(A.nonZeros() + B.nonZeros()));
    for (Index j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    for (Index j = 0; j < B.outerSize(); ++j)
        for (SpMat::InnerIterator it(B, j); it; ++it)
            t.emplace_back(A.rows() + it.row(), it.col(), it.value());
    SpMat out(A.rows() + B.rows(), A.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

SpMat kron(const SpMat &A, const SpMat &B) {
    SpMat out = Eigen::kroneckerProduct(A, B).eval();
    out.prune(0.0);
    return out;
}

} // namespace

Permutation commutation_matrix(Index r, Index c) {
    if (r < 1 || c < 1)
        fail(ErrorKind::InvalidInput, "commutation matrix dimensions must be positive");
    Permutation P;
    P.src.resize(static_cast<size_t>(r * c));
    // X(i,j) sits at i + j r in vec(X) and at j + i c in vec(X').
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j)
            P.src[static_cast<size_t>(j + i * c)] = i + j * r;
    return P;
}

Index numerical_rank(const MatrixXd &A, double rel_tol) {
    if (A.size() == 0)
        return 0;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(rel_tol);
    return qr.rank();
}

Index CrossTemporalStructure::expected_rank() const {
    if (raw)
        return kernel.rows();
    return h * (cs->n_a * ts.m + n * ts.k_star);
}

const CrossSectionalStructure &CrossTemporalStructure::cross_sectional() const {
    if (!cs)
        fail(ErrorKind::InvalidInput, "raw-constraint structure has no cross-sectional hierarchy");
    return *cs;
}

CrossTemporalStructure build_cross_temporal(const CrossSectionalStructure &cs, const TemporalStructure &ts, Index h) {
    if (h < 1)
        fail(ErrorKind::InvalidInput, "forecast cycles h must be positive");
    CrossTemporalStructure x;
    x.cs = cs;
    x.ts = ts;
    x.h = h;
    x.n = cs.n();
    x.labels = cs.labels;

    const Index n = cs.n(), n_a = cs.n_a, n_b = cs.n_b;
    const Index L = x.cols();
    const Index lf = x.lf_cols(), hf = x.hf_cols();

    const SpMat Ut = cs.kernel.sparseView();
    const SpMat Zh = build_full_temporal_kernel(ts, h).sparseView();
    const SpMat temporal_rows = kron(identity(n), Zh);

    x.kernel_redundant = vstack(kron(Ut, identity(L)), temporal_rows);
    x.commutation = commutation_matrix(n, L);

    // U* = [0 | I_{hm} (x) U'] P': constraint (j, a) touches column lf + j of every series.
    std::vector<Eigen::Triplet<double>> t;
    for (Index j = 0; j < hf; ++j)
        for (Index a = 0; a < n_a; ++a)
            for (Index i = 0; i < n; ++i)
                if (cs.kernel(a, i) != 0.0)
                    t.emplace_back(j * n_a + a, i * L + lf + j, cs.kernel(a, i));
    SpMat Ustar(hf * n_a, n * L);
    Ustar.setFromTriplets(t.begin(), t.end());
    x.kernel = vstack(Ustar, temporal_rows);

    const SpMat C = cs.agg_matrix.sparseView();
    const SpMat Rh = full_temporal_summing(ts, h).sparseView();
    const SpMat Kh = full_temporal_aggregation(ts, h).sparseView();
    x.struct_agg = vstack(kron(C, Rh), kron(identity(n_b), Kh));
    x.struct_summing = vstack(x.struct_agg, identity(n_b * hf));

    // y_check = [vec(A'); vec(B_lf'); vec(B_hf')].
    x.struct_perm.src.resize(static_cast<size_t>(n * L));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < L; ++j) {
            Index s;
            if (i < n_a) {
                s = i * L + j;
            } else {
                const Index b = i - n_a;
                s = j < lf ? n_a * L + b * lf + j : n_a * L + n_b * lf + b * hf + (j - lf);
            }
            x.struct_perm.src[static_cast<size_t>(i * L + j)] = s;
        }
    }
    return x;
}

CrossTemporalStructure build_cross_temporal_raw(const MatrixXd &kernel, Index n, const TemporalStructure &ts, Index h,
                                                std::vector<std::string> labels) {
    if (h < 1 || n < 1)
        fail(ErrorKind::InvalidInput, "n and h must be positive");
    CrossTemporalStructure x;
    x.ts = ts;
    x.h = h;
    x.n = n;
    x.raw = true;
    if (kernel.cols() != x.dim())
        fail(ErrorKind::DimensionMismatch, "raw kernel has " + std::to_string(kernel.cols()) + " columns, expected " +
                                               std::to_string(x.dim()));
    if (!kernel.allFinite())
        fail(ErrorKind::InvalidEntry, "raw kernel has non-finite entries");
    const Index rank = numerical_rank(kernel);
    if (rank != kernel.rows())
        fail(ErrorKind::InvalidInput, "raw kernel is not full row rank: rank " + std::to_string(rank) + " < " +
                                          std::to_string(kernel.rows()) + " rows");
    if (labels.empty())
        for (Index i = 0; i < n; ++i)
            labels.push_back("S" + std::to_string(i + 1));
    if (static_cast<Index>(labels.size()) != n)
        fail(ErrorKind::DimensionMismatch, "label count does not match n");
    x.labels = std::move(labels);
    x.kernel = kernel.sparseView();
    x.commutation = commutation_matrix(n, x.cols());
    return x;
}

MatrixXd hf_bottom(const MatrixXd &Y, const CrossTemporalStructure &xts) {
    const auto &cs = xts.cross_sectional();
    if (Y.rows() != xts.n || Y.cols() != xts.cols())
        fail(ErrorKind::DimensionMismatch, "tableau shape does not match structure");
    return Y.block(cs.n_a, xts.lf_cols(), cs.n_b, xts.hf_cols());
}

ForecastTableau bottom_up(const MatrixXd &B_hf, const CrossTemporalStructure &xts) {
    if (xts.raw)
        fail(ErrorKind::InvalidInput, "bottom-up is unavailable on the raw-constraint path");
    const auto &cs = xts.cross_sectional();
    if (B_hf.rows() != cs.n_b || B_hf.cols() != xts.hf_cols())
        fail(ErrorKind::DimensionMismatch, "bottom block must be " + std::to_string(cs.n_b) + " x " +
                                               std::to_string(xts.hf_cols()));
    const MatrixXd Kh = full_temporal_aggregation(xts.ts, xts.h);
    MatrixXd bottoms(cs.n_b, xts.cols());
    bottoms << B_hf * Kh.transpose(), B_hf;
    ForecastTableau out;
    out.values.resize(xts.n, xts.cols());
    out.values << cs.agg_matrix * bottoms, bottoms;
    out.provenance = "bottom-up";
    return out;
}

ForecastTableau bottom_up_structural(const MatrixXd &B_hf, const CrossTemporalStructure &xts) {
    if (xts.raw)
        fail(ErrorKind::InvalidInput, "structural form is unavailable on the raw-constraint path");
    const auto &cs = xts.cross_sectional();
    if (B_hf.rows() != cs.n_b || B_hf.cols() != xts.hf_cols())
        fail(ErrorKind::DimensionMismatch, "bottom block shape mismatch");
    MatrixXd Bt = B_hf.transpose();
    const VectorXd b = Eigen::Map<const VectorXd>(Bt.data(), Bt.size());
    const VectorXd y_check = xts.struct_summing * b;
    return ForecastTableau::from_by_variable(xts.struct_perm.apply(y_check), xts.n, xts.cols(), "bottom-up");
}

CoherenceReport coherence_report(const MatrixXd &Y, const CrossSectionalStructure &cs, const TemporalStructure &ts,
                                 Index h) {
    if (Y.rows() != cs.n() || Y.cols() != h * ts.total())
        fail(ErrorKind::DimensionMismatch, "tableau is " + std::to_string(Y.rows()) + " x " +
                                               std::to_string(Y.cols()) + ", expected " + std::to_string(cs.n()) +
                                               " x " + std::to_string(h * ts.total()));
    CoherenceReport r;
    const MatrixXd cs_err = cs.kernel * Y;
    if (cs_err.size() > 0) {
        r.d_cs = cs_err.cwiseAbs().sum();
        r.max_cs = cs_err.cwiseAbs().maxCoeff();
    }
    if (ts.k_star > 0) {
        const MatrixXd te_err = build_full_temporal_kernel(ts, h) * Y.transpose();
        r.d_te = te_err.cwiseAbs().sum();
        r.max_te = te_err.cwiseAbs().maxCoeff();
    }
    return r;
}

CoherenceReport coherence_report(const MatrixXd &Y, const CrossTemporalStructure &xts) {
    return coherence_report(Y, xts.cross_sectional(), xts.ts, xts.h);
}

double kernel_violation(const MatrixXd &Y, const CrossTemporalStructure &xts) {
    if (Y.rows() != xts.n || Y.cols() != xts.cols())
        fail(ErrorKind::DimensionMismatch, "tableau shape does not match structure");
    ForecastTableau t{Y, ""};
    const VectorXd r = xts.kernel * t.vec_by_variable();
    return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace ctrec
