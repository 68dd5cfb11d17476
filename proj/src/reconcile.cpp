#include "ctrec/reconcile.hpp"

#include <algorithm>

#include "ctrec/errors.hpp"

namespace ctrec {

namespace {

constexpr double kIllConditioned = 1e12;

void absorb(SolveDiagnostics &into, const SolveDiagnostics &d) {
    if (d.condition_estimate > into.condition_estimate)
        into.condition_estimate = d.condition_estimate;
    into.ill_conditioned = into.ill_conditioned || d.ill_conditioned;
    into.factorization = d.factorization;
}

SolveDiagnostics factorize(Eigen::LLT<MatrixXd> &llt, MatrixXd A, const char *what) {
    A = 0.5 * (A + A.transpose());
    llt.compute(A);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::SingularSystem, std::string(what) + " is not positive definite");
    SolveDiagnostics d;
    const double rc = A.rows() ? llt.rcond() : 1.0;
    if (!(rc > 0.0))
        fail(ErrorKind::SingularSystem, std::string(what) + " is numerically singular");
    d.condition_estimate = 1.0 / rc;
    d.ill_conditioned = d.condition_estimate > kIllConditioned;
    return d;
}

ReconciliationResult wrap(const MatrixXd &Y_hat, MatrixXd Y, const std::string &provenance,
                          const SolveDiagnostics &diag) {
    ReconciliationResult r;
    r.adjustment = Y_hat - Y;
    r.reconciled.values = std::move(Y);
    r.reconciled.provenance = provenance;
    r.diagnostics = diag;
    return r;
}

void check_tableau(const MatrixXd &Y, const CrossTemporalStructure &xts) {
    if (Y.rows() != xts.n || Y.cols() != xts.cols())
        fail(ErrorKind::DimensionMismatch, "tableau is " + std::to_string(Y.rows()) + " x " + std::to_string(Y.cols()) +
                                               ", structure expects " + std::to_string(xts.n) + " x " +
                                               std::to_string(xts.cols()));
}

MatrixXd cs_levels(const MatrixXd &Y_hat, const CrossSectionalStructure &cs, const TemporalStructure &ts, Index h,
                   const std::vector<CovarianceModel> &per_level, SolveDiagnostics *diag) {
    if (Y_hat.rows() != cs.n() || Y_hat.cols() != h * ts.total())
        fail(ErrorKind::DimensionMismatch, "tableau shape does not match structure");
    if (static_cast<int>(per_level.size()) != ts.p() && per_level.size() != 1)
        fail(ErrorKind::DimensionMismatch, "need one cross-sectional model per temporal level");
    const SpMat Ut = cs.kernel.sparseView();
    MatrixXd out = Y_hat;
    for (int level = 0; level < ts.p(); ++level) {
        const auto &W = per_level.size() == 1 ? per_level[0] : per_level[static_cast<size_t>(level)];
        Projector proj(Ut, W);
        if (diag)
            absorb(*diag, proj.diagnostics());
        const Index width = h * ts.M(ts.factors[static_cast<size_t>(level)]);
        const Index first = ts.level_offset(level) * h;
        out.middleCols(first, width) = proj.apply_columns(Y_hat.middleCols(first, width));
    }
    return out;
}

MatrixXd temporal_rows(const MatrixXd &Y_hat, const TemporalStructure &ts, Index h,
                       const std::vector<CovarianceModel> &per_series, SolveDiagnostics *diag) {
    if (Y_hat.cols() != h * ts.total())
        fail(ErrorKind::DimensionMismatch, "tableau has " + std::to_string(Y_hat.cols()) + " columns, expected " +
                                               std::to_string(h * ts.total()));
    if (per_series.empty() || (per_series.size() != 1 && static_cast<Index>(per_series.size()) != Y_hat.rows()))
        fail(ErrorKind::DimensionMismatch, "need one temporal model, or one per series");
    if (ts.k_star == 0)
        return Y_hat;
    const SpMat Zh = build_full_temporal_kernel(ts, h).sparseView();
    if (per_series.size() == 1) {
        Projector proj(Zh, expand_temporal(per_series[0], ts, h));
        if (diag)
            absorb(*diag, proj.diagnostics());
        return proj.apply_columns(Y_hat.transpose()).transpose();
    }
    MatrixXd out(Y_hat.rows(), Y_hat.cols());
    for (Index i = 0; i < Y_hat.rows(); ++i) {
        Projector proj(Zh, expand_temporal(per_series[static_cast<size_t>(i)], ts, h));
        if (diag)
            absorb(*diag, proj.diagnostics());
        out.row(i) = proj.apply(Y_hat.row(i).transpose()).transpose();
    }
    return out;
}

} // namespace

Projector::Projector(const SpMat &Ht, const CovarianceModel &W) : Ht_(Ht) {
    if (W.dim() != Ht.cols())
        fail(ErrorKind::DimensionMismatch, "covariance dimension " + std::to_string(W.dim()) +
                                               " does not match kernel width " + std::to_string(Ht.cols()));
    dense_w_ = W.structure == CovStructure::Full;
    MatrixXd HWH;
    if (dense_w_) {
        W_dense_ = W.dense;
        WH_dense_ = W.dense * SpMat(Ht.transpose());
        HWH = Ht * WH_dense_;
    } else {
        WH_sparse_ = W.sparse * SpMat(Ht.transpose());
        HWH = MatrixXd(Ht * WH_sparse_);
    }
    diag_ = factorize(llt_, std::move(HWH), "H'WH");
}

VectorXd Projector::correction(const VectorXd &lambda) const {
    return dense_w_ ? VectorXd(WH_dense_ * lambda) : VectorXd(WH_sparse_ * lambda);
}

VectorXd Projector::apply(const VectorXd &y) const {
    if (y.size() != dim())
        fail(ErrorKind::DimensionMismatch, "vector length " + std::to_string(y.size()) + " does not match " +
                                               std::to_string(dim()));
    if (Ht_.rows() == 0)
        return y;
    return y - correction(llt_.solve(VectorXd(Ht_ * y)));
}

MatrixXd Projector::apply_columns(const MatrixXd &Y) const {
    if (Y.rows() != dim())
        fail(ErrorKind::DimensionMismatch, "column length does not match projector");
    if (Ht_.rows() == 0)
        return Y;
    const MatrixXd lambda = llt_.solve(MatrixXd(Ht_ * Y));
    return dense_w_ ? MatrixXd(Y - WH_dense_ * lambda) : MatrixXd(Y - WH_sparse_ * lambda);
}

MatrixXd Projector::matrix() const { return apply_columns(MatrixXd::Identity(dim(), dim())); }

std::optional<MatrixXd> Projector::reconciled_covariance() const {
    if (!dense_w_)
        return std::nullopt;
    if (Ht_.rows() == 0)
        return W_dense_;
    return MatrixXd(W_dense_ - WH_dense_ * llt_.solve(MatrixXd(WH_dense_.transpose())));
}

ProjectionResult project(const VectorXd &y_hat, const CovarianceModel &W, const SpMat &Ht) {
    Projector proj(Ht, W);
    ProjectionResult r;
    r.reconciled = proj.apply(y_hat);
    r.adjustment = y_hat - r.reconciled;
    r.coherency_errors = -(Ht * y_hat);
    r.diagnostics = proj.diagnostics();
    return r;
}

ProjectionResult project(const VectorXd &y_hat, const CovarianceModel &W, const MatrixXd &Ht) {
    return project(y_hat, W, SpMat(Ht.sparseView()));
}

ProjectionResult project_structural(const VectorXd &y_hat, const CovarianceModel &W, const MatrixXd &S) {
    if (S.rows() != y_hat.size() || W.dim() != y_hat.size())
        fail(ErrorKind::DimensionMismatch, "structural matrix, covariance and forecasts disagree in size");
    MatrixXd WiS;
    if (W.structure == CovStructure::Identity || W.structure == CovStructure::Diagonal) {
        const VectorXd d = W.diagonal();
        if ((d.array() <= 0.0).any())
            fail(ErrorKind::SingularSystem, "W has non-positive diagonal entries");
        WiS = d.cwiseInverse().asDiagonal() * S;
    } else {
        Eigen::LLT<MatrixXd> wl;
        factorize(wl, W.to_dense(), "W");
        WiS = wl.solve(S);
    }
    Eigen::LLT<MatrixXd> llt;
    ProjectionResult r;
    r.diagnostics = factorize(llt, S.transpose() * WiS, "S'W^{-1}S");
    r.beta = llt.solve(WiS.transpose() * y_hat);
    r.reconciled = S * r.beta;
    r.adjustment = y_hat - r.reconciled;
    return r;
}

ProjectionResult project_structural(const VectorXd &y_hat, const CovarianceModel &W, const SpMat &S) {
    return project_structural(y_hat, W, MatrixXd(S));
}

MatrixXd reconcile_cross_sectional(const MatrixXd &Y_hat, const CrossSectionalStructure &cs,
                                   const CovarianceModel &W) {
    if (Y_hat.rows() != cs.n())
        fail(ErrorKind::DimensionMismatch, "forecast matrix has " + std::to_string(Y_hat.rows()) + " rows, expected " +
                                               std::to_string(cs.n()));
    return Projector(cs.kernel.sparseView(), W).apply_columns(Y_hat);
}

MatrixXd reconcile_cross_sectional_levels(const MatrixXd &Y_hat, const CrossSectionalStructure &cs,
                                          const TemporalStructure &ts, Index h,
                                          const std::vector<CovarianceModel> &per_level) {
    return cs_levels(Y_hat, cs, ts, h, per_level, nullptr);
}

MatrixXd reconcile_temporal(const MatrixXd &Y_hat, const TemporalStructure &ts, Index h,
                            const std::vector<CovarianceModel> &per_series) {
    return temporal_rows(Y_hat, ts, h, per_series, nullptr);
}

ReconciliationResult reconcile_cross_temporal(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                              const CovarianceModel &W) {
    check_tableau(Y_hat, xts);
    const CovarianceModel omega = expand_cross_temporal(W, xts);
    const ForecastTableau base{Y_hat, "base"};
    Projector proj(xts.kernel, omega);
    const VectorXd y_hat = base.vec_by_variable();
    const VectorXd y = proj.apply(y_hat);
    ReconciliationResult r =
        wrap(Y_hat, ForecastTableau::from_by_variable(y, xts.n, xts.cols(), "").values, "reconciled:" + W.kind,
             proj.diagnostics());
    r.coherency_errors_before = -(xts.kernel * y_hat);
    r.reconciled_covariance = proj.reconciled_covariance();
    return r;
}

ReconciliationResult reconcile_cross_temporal_by_time(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                                      const CovarianceModel &W) {
    check_tableau(Y_hat, xts);
    const CovarianceModel omega = expand_cross_temporal(W, xts);
    const SpMat P = xts.commutation.sparse();
    const SpMat Pt = P.transpose();
    CovarianceModel w_time = omega;
    if (omega.structure == CovStructure::Full)
        w_time.dense = Pt * omega.dense * P;
    else
        w_time.sparse = Pt * omega.sparse * P;
    const SpMat kernel_time = xts.kernel * P;
    const ForecastTableau base{Y_hat, "base"};
    const ProjectionResult pr = project(base.vec_by_time(), w_time, kernel_time);
    MatrixXd Y = Eigen::Map<const MatrixXd>(pr.reconciled.data(), xts.n, xts.cols());
    ReconciliationResult r = wrap(Y_hat, std::move(Y), "reconciled:" + W.kind, pr.diagnostics);
    r.coherency_errors_before = pr.coherency_errors;
    return r;
}

ReconciliationResult reconcile_cross_temporal_structural(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                                         const CovarianceModel &W) {
    check_tableau(Y_hat, xts);
    if (!xts.structural())
        fail(ErrorKind::InvalidInput, "structural form is unavailable on the raw-constraint path");
    const CovarianceModel omega = expand_cross_temporal(W, xts);
    const SpMat S = xts.struct_perm.sparse() * xts.struct_summing;
    const ForecastTableau base{Y_hat, "base"};
    const VectorXd y_hat = base.vec_by_variable();
    const ProjectionResult pr = project_structural(y_hat, omega, S);
    ReconciliationResult r = wrap(Y_hat, ForecastTableau::from_by_variable(pr.reconciled, xts.n, xts.cols(), "").values,
                                  "reconciled:" + W.kind, pr.diagnostics);
    r.coherency_errors_before = -(xts.kernel * y_hat);
    return r;
}

std::vector<CovarianceModel> per_level_cs_models(const std::string &kind, const CrossSectionalStructure &cs,
                                                 const TemporalStructure &ts,
                                                 const std::optional<ResidualTableau> &residuals) {
    std::vector<CovarianceModel> out;
    if (!kind_needs_residuals(kind)) {
        out.push_back(cross_sectional_cov(kind, cs));
        return out;
    }
    if (!residuals)
        fail(ErrorKind::InvalidInput, kind + " requires in-sample residuals");
    residuals->validate(ts);
    for (int level = 0; level < ts.p(); ++level)
        out.push_back(cross_sectional_cov(kind, cs, residuals->level(ts, level)));
    return out;
}

std::vector<CovarianceModel> per_series_t_models(const std::string &kind, const TemporalStructure &ts, Index n,
                                                 const std::optional<ResidualTableau> &residuals) {
    std::vector<CovarianceModel> out;
    if (!kind_needs_residuals(kind)) {
        out.push_back(temporal_cov(kind, ts));
        return out;
    }
    if (!residuals)
        fail(ErrorKind::InvalidInput, kind + " requires in-sample residuals");
    residuals->validate(ts);
    if (residuals->n != n)
        fail(ErrorKind::DimensionMismatch, "residuals cover " + std::to_string(residuals->n) + " series, expected " +
                                               std::to_string(n));
    for (Index i = 0; i < n; ++i)
        out.push_back(temporal_cov(kind, ts, residuals->series(ts, i)));
    return out;
}

ReconciliationResult reconcile_method(const std::string &method, const MatrixXd &Y_hat,
                                      const CrossTemporalStructure &xts,
                                      const std::optional<ResidualTableau> &residuals) {
    check_tableau(Y_hat, xts);
    if (method == "bu") {
        ForecastTableau t = bottom_up(hf_bottom(Y_hat, xts), xts);
        ReconciliationResult r = wrap(Y_hat, std::move(t.values), "bottom-up", SolveDiagnostics{});
        r.coherency_errors_before = -(xts.kernel * ForecastTableau{Y_hat, ""}.vec_by_variable());
        return r;
    }
    const auto &cs = xts.cross_sectional();
    SolveDiagnostics diag;
    if (is_cs_kind(method)) {
        MatrixXd Y = cs_levels(Y_hat, cs, xts.ts, xts.h, per_level_cs_models(method, cs, xts.ts, residuals), &diag);
        return wrap(Y_hat, std::move(Y), "reconciled:" + method, diag);
    }
    if (is_t_kind(method)) {
        MatrixXd Y = temporal_rows(Y_hat, xts.ts, xts.h, per_series_t_models(method, xts.ts, xts.n, residuals), &diag);
        return wrap(Y_hat, std::move(Y), "reconciled:" + method, diag);
    }
    if (is_oct_kind(method))
        return reconcile_cross_temporal(Y_hat, xts, cross_temporal_cov(method, cs, xts.ts, residuals));
    fail(ErrorKind::InvalidInput, "unknown reconciliation method '" + method + "'");
}

} // namespace ctrec
