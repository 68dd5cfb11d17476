#include "ctrec/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "ctrec/errors.hpp"

namespace ctrec {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

const std::vector<std::string> kCsKinds = {"cs-ols", "cs-struc", "cs-wls", "cs-shr", "cs-sam"};
const std::vector<std::string> kTKinds = {"t-ols",  "t-struc", "t-wlsh",   "t-wlsv", "t-shr",
                                          "t-sam",  "t-acov",  "t-strar1", "t-sar1", "t-har1"};
const std::vector<std::string> kOctKinds = {"oct-ols",   "oct-struc", "oct-wlsh", "oct-wlsv", "oct-bdshr",
                                            "oct-bdsam", "oct-acov",  "oct-shr",  "oct-sam"};
const char *kOctExperimental = "oct-bdsam-l";

bool contains(const std::vector<std::string> &v, const std::string &s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

void add_block(Triplets &t, const std::vector<Index> &idx, const MatrixXd &B) {
    for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = 0; b < idx.size(); ++b)
            if (B(static_cast<Index>(a), static_cast<Index>(b)) != 0.0)
                t.emplace_back(idx[a], idx[b], B(static_cast<Index>(a), static_cast<Index>(b)));
}

SpMat from_triplets(Index n, const Triplets &t) {
    SpMat M(n, n);
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

const MatrixXd &need(const std::optional<MatrixXd> &E, const std::string &kind) {
    if (!E)
        fail(ErrorKind::InvalidInput, kind + " requires in-sample residuals");
    if (E->cols() < 2)
        fail(ErrorKind::InvalidInput, kind + " requires at least 2 residual observations, got " +
                                          std::to_string(E->cols()));
    if (!E->allFinite())
        fail(ErrorKind::InvalidEntry, kind + ": residuals contain non-finite values");
    return *E;
}

void singular(const std::string &kind, const std::string &condition, Index N, Index bound) {
    fail(ErrorKind::SingularCovariance, kind + " requires " + condition + " (N = " + std::to_string(N) +
                                            ", bound = " + std::to_string(bound) + ")");
}

// Lift tiny negative spectra from rounding; reject anything worse.
MatrixXd repair_psd(MatrixXd M, const std::string &kind) {
    M = 0.5 * (M + M.transpose());
    const double tr = M.trace();
    if (M.rows() == 0 || tr <= 0.0)
        fail(ErrorKind::SingularCovariance, kind + ": sample matrix has zero trace");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    const double floor = 1e-8 * tr;
    if (min_ev > floor)
        return M;
    if (min_ev > -floor) {
        M.diagonal().array() += floor;
        return M;
    }
    fail(ErrorKind::SingularCovariance, kind + ": sample matrix is not positive semi-definite (min eigenvalue " +
                                            std::to_string(min_ev) + ")");
}

MatrixXd markov_block(const VectorXd &d, double rho) {
    const Index M = d.size();
    MatrixXd B(M, M);
    for (Index a = 0; a < M; ++a)
        for (Index b = 0; b < M; ++b)
            B(a, b) = std::sqrt(d(a) * d(b)) * std::pow(rho, static_cast<double>(std::abs(a - b)));
    return B;
}

// Level-k residual sequence of one series: cycle-major, then position within the cycle.
VectorXd level_sequence(const MatrixXd &Ex, const TemporalStructure &ts, int level) {
    const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
    const Index off = ts.level_offset(level);
    const Index N = Ex.cols();
    VectorXd s(N * Mk);
    for (Index tau = 0; tau < N; ++tau)
        for (Index l = 0; l < Mk; ++l)
            s(tau * Mk + l) = Ex(off + l, tau);
    return s;
}

VectorXd per_level_variance(const MatrixXd &Ex, const TemporalStructure &ts) {
    VectorXd d(ts.total());
    for (int level = 0; level < ts.p(); ++level) {
        const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
        const Index off = ts.level_offset(level);
        const double v = Ex.middleRows(off, Mk).squaredNorm() / static_cast<double>(Ex.cols() * Mk);
        d.segment(off, Mk).setConstant(v);
    }
    return d;
}

} // namespace

const char *to_string(CovStructure s) {
    switch (s) {
    case CovStructure::Identity: return "identity";
    case CovStructure::Diagonal: return "diagonal";
    case CovStructure::BlockDiagonal: return "block-diagonal";
    case CovStructure::Full: return "full";
    }
    return "?";
}

MatrixXd CovarianceModel::to_dense() const { return structure == CovStructure::Full ? dense : MatrixXd(sparse); }

SpMat CovarianceModel::to_sparse() const { return structure == CovStructure::Full ? SpMat(dense.sparseView()) : sparse; }

VectorXd CovarianceModel::diagonal() const {
    return structure == CovStructure::Full ? VectorXd(dense.diagonal()) : VectorXd(sparse.diagonal());
}

CovarianceModel CovarianceModel::identity(Index n, std::string kind) {
    CovarianceModel m;
    m.kind = std::move(kind);
    m.structure = CovStructure::Identity;
    m.sparse.resize(n, n);
    m.sparse.setIdentity();
    return m;
}

CovarianceModel CovarianceModel::diagonal_of(const VectorXd &d, std::string kind) {
    CovarianceModel m;
    m.kind = std::move(kind);
    m.structure = CovStructure::Diagonal;
    Triplets t;
    for (Index i = 0; i < d.size(); ++i)
        t.emplace_back(i, i, d(i));
    m.sparse = from_triplets(d.size(), t);
    return m;
}

CovarianceModel CovarianceModel::full(MatrixXd M, std::string kind) {
    CovarianceModel m;
    m.kind = std::move(kind);
    m.structure = CovStructure::Full;
    m.dense = std::move(M);
    return m;
}

CovarianceModel CovarianceModel::block(SpMat M, std::string kind) {
    CovarianceModel m;
    m.kind = std::move(kind);
    m.structure = CovStructure::BlockDiagonal;
    m.sparse = std::move(M);
    return m;
}

void ResidualTableau::validate(const TemporalStructure &ts) const {
    if (n < 1)
        fail(ErrorKind::InvalidInput, "residual tableau has no series");
    if (E.rows() != n * ts.total())
        fail(ErrorKind::DimensionMismatch, "residual tableau has " + std::to_string(E.rows()) + " rows, expected n(k*+m) = " +
                                               std::to_string(n * ts.total()));
    if (E.cols() < 1)
        fail(ErrorKind::InvalidInput, "residual tableau has no observations");
    if (!E.allFinite())
        fail(ErrorKind::InvalidEntry, "residual tableau has non-finite entries");
}

MatrixXd ResidualTableau::node(const TemporalStructure &ts, int level, Index l) const {
    if (ordering != Ordering::ByTime)
        return to_by_time(ts).node(ts, level, l);
    const Index r = ts.level_offset(level) + l;
    return E.middleRows(r * n, n);
}

MatrixXd ResidualTableau::level(const TemporalStructure &ts, int level) const {
    const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
    MatrixXd out(n, N() * Mk);
    for (Index l = 0; l < Mk; ++l)
        out.middleCols(l * N(), N()) = node(ts, level, l);
    return out;
}

MatrixXd ResidualTableau::series(const TemporalStructure &ts, Index i) const {
    const Index T = ts.total();
    MatrixXd out(T, N());
    for (Index r = 0; r < T; ++r)
        out.row(r) = ordering == Ordering::ByTime ? E.row(r * n + i) : E.row(i * T + r);
    return out;
}

ResidualTableau ResidualTableau::to_by_variable(const TemporalStructure &ts) const {
    if (ordering == Ordering::ByVariable)
        return *this;
    const Index T = ts.total();
    ResidualTableau out{MatrixXd(E.rows(), E.cols()), n, Ordering::ByVariable};
    for (Index i = 0; i < n; ++i)
        for (Index r = 0; r < T; ++r)
            out.E.row(i * T + r) = E.row(r * n + i);
    return out;
}

ResidualTableau ResidualTableau::to_by_time(const TemporalStructure &ts) const {
    if (ordering == Ordering::ByTime)
        return *this;
    const Index T = ts.total();
    ResidualTableau out{MatrixXd(E.rows(), E.cols()), n, Ordering::ByTime};
    for (Index i = 0; i < n; ++i)
        for (Index r = 0; r < T; ++r)
            out.E.row(r * n + i) = E.row(i * T + r);
    return out;
}

MatrixXd sample_mse(const MatrixXd &E) {
    if (E.cols() < 1)
        fail(ErrorKind::InvalidInput, "sample_mse needs at least one observation");
    MatrixXd M = MatrixXd::Zero(E.rows(), E.rows());
    M.selfadjointView<Eigen::Lower>().rankUpdate(E);
    M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    return M / static_cast<double>(E.cols());
}

double shrinkage_intensity(const MatrixXd &E) {
    const Index p = E.rows();
    const double N = static_cast<double>(E.cols());
    if (E.cols() < 2)
        fail(ErrorKind::InvalidInput, "shrinkage intensity needs at least 2 observations");
    if (p < 2)
        return 1.0;
    const VectorXd s = E.rowwise().squaredNorm() / N;
    for (Index i = 0; i < p; ++i)
        if (!(s(i) > 0.0))
            fail(ErrorKind::DegenerateSample, "series " + std::to_string(i) + " has zero residual variance");
    const MatrixXd X = s.cwiseSqrt().cwiseInverse().asDiagonal() * E;
    const MatrixXd X2 = X.cwiseProduct(X);
    const MatrixXd r = X * X.transpose() / N;
    // sum_t (w_t - r)^2 = sum_t w_t^2 - N r^2, w_t = x_i x_j
    const MatrixXd ss = X2 * X2.transpose() - N * r.cwiseProduct(r);
    double num = 0.0, den = 0.0;
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < p; ++i)
            if (i != j) {
                num += std::max(ss(i, j), 0.0) / (N * (N - 1.0));
                den += r(i, j) * r(i, j);
            }
    if (den <= 0.0)
        return 1.0;
    return std::clamp(num / den, 0.0, 1.0);
}

MatrixXd shrink_toward_diagonal(const MatrixXd &sample, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        fail(ErrorKind::InvalidInput, "shrinkage intensity must lie in [0,1]");
    MatrixXd out = (1.0 - lambda) * sample;
    out.diagonal() = sample.diagonal();
    return out;
}

ShrinkResult shrink(const MatrixXd &E, std::optional<double> lambda_override) {
    const MatrixXd S = sample_mse(E);
    for (Index i = 0; i < S.rows(); ++i)
        if (!(S(i, i) > 0.0))
            fail(ErrorKind::DegenerateSample, "series " + std::to_string(i) + " has zero residual variance");
    const double lambda = lambda_override ? *lambda_override : shrinkage_intensity(E);
    return {shrink_toward_diagonal(S, lambda), lambda};
}

double lag1_autocorrelation(const VectorXd &s) {
    if (s.size() < 2)
        return 0.0;
    const double den = s.squaredNorm();
    if (den <= 0.0)
        return 0.0;
    return s.head(s.size() - 1).dot(s.tail(s.size() - 1)) / den;
}

bool is_cs_kind(const std::string &kind) { return contains(kCsKinds, kind); }
bool is_t_kind(const std::string &kind) { return contains(kTKinds, kind); }
bool is_oct_kind(const std::string &kind) { return contains(kOctKinds, kind) || kind == kOctExperimental; }
bool kind_needs_residuals(const std::string &kind) {
    return !(kind == "cs-ols" || kind == "cs-struc" || kind == "t-ols" || kind == "t-struc" || kind == "oct-ols" ||
             kind == "oct-struc");
}
std::vector<std::string> cs_kinds() { return kCsKinds; }
std::vector<std::string> t_kinds() { return kTKinds; }
std::vector<std::string> oct_kinds(bool include_experimental) {
    auto v = kOctKinds;
    if (include_experimental)
        v.push_back(kOctExperimental);
    return v;
}

void require_spd(const CovarianceModel &model) {
    const std::string &kind = model.kind;
    if (model.structure == CovStructure::Identity)
        return;
    if (model.structure == CovStructure::Diagonal) {
        const VectorXd d = model.diagonal();
        for (Index i = 0; i < d.size(); ++i)
            if (!(d(i) > 0.0) || !std::isfinite(d(i)))
                fail(ErrorKind::SingularCovariance, kind + ": diagonal entry " + std::to_string(i) +
                                                        " is not strictly positive");
        return;
    }
    const MatrixXd M = model.to_dense();
    if (!M.allFinite())
        fail(ErrorKind::SingularCovariance, kind + ": non-finite entries");
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
        fail(ErrorKind::SingularCovariance, kind + ": matrix is not symmetric");
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::SingularCovariance, kind + ": matrix is not positive definite");
}

CovarianceModel cross_sectional_cov(const std::string &kind, const CrossSectionalStructure &cs,
                                    const std::optional<MatrixXd> &E) {
    const Index n = cs.n();
    CovarianceModel out;
    if (kind == "cs-ols") {
        out = CovarianceModel::identity(n, kind);
    } else if (kind == "cs-struc") {
        out = CovarianceModel::diagonal_of(cs.summing_matrix.rowwise().sum(), kind);
    } else if (is_cs_kind(kind)) {
        const MatrixXd &R = need(E, kind);
        if (R.rows() != n)
            fail(ErrorKind::DimensionMismatch, kind + ": residuals have " + std::to_string(R.rows()) +
                                                   " rows, expected n = " + std::to_string(n));
        if (kind == "cs-wls") {
            out = CovarianceModel::diagonal_of(R.rowwise().squaredNorm() / static_cast<double>(R.cols()), kind);
        } else if (kind == "cs-shr") {
            ShrinkResult s = shrink(R);
            out = CovarianceModel::full(std::move(s.matrix), kind);
            out.lambda = {s.lambda};
        } else {
            if (R.cols() <= n)
                singular(kind, "N > n", R.cols(), n);
            out = CovarianceModel::full(repair_psd(sample_mse(R), kind), kind);
        }
    } else {
        fail(ErrorKind::InvalidInput, "unknown cross-sectional covariance kind '" + kind + "'");
    }
    require_spd(out);
    return out;
}

CovarianceModel temporal_cov(const std::string &kind, const TemporalStructure &ts, const std::optional<MatrixXd> &Ex) {
    const Index T = ts.total();
    CovarianceModel out;
    if (kind == "t-ols") {
        out = CovarianceModel::identity(T, kind);
        require_spd(out);
        return out;
    }
    VectorXd struc(T);
    for (int level = 0; level < ts.p(); ++level)
        struc.segment(ts.level_offset(level), ts.M(ts.factors[static_cast<size_t>(level)]))
            .setConstant(ts.factors[static_cast<size_t>(level)]);
    if (kind == "t-struc") {
        out = CovarianceModel::diagonal_of(struc, kind);
        require_spd(out);
        return out;
    }
    if (!is_t_kind(kind))
        fail(ErrorKind::InvalidInput, "unknown temporal covariance kind '" + kind + "'");

    const MatrixXd &R = need(Ex, kind);
    if (R.rows() != T)
        fail(ErrorKind::DimensionMismatch, kind + ": residuals have " + std::to_string(R.rows()) +
                                               " rows, expected k*+m = " + std::to_string(T));
    const Index N = R.cols();
    const VectorXd wlsh = R.rowwise().squaredNorm() / static_cast<double>(N);

    if (kind == "t-wlsh") {
        out = CovarianceModel::diagonal_of(wlsh, kind);
    } else if (kind == "t-wlsv") {
        out = CovarianceModel::diagonal_of(per_level_variance(R, ts), kind);
    } else if (kind == "t-shr") {
        ShrinkResult s = shrink(R);
        out = CovarianceModel::full(std::move(s.matrix), kind);
        out.lambda = {s.lambda};
    } else if (kind == "t-sam") {
        if (N <= T)
            singular(kind, "N > k*+m", N, T);
        out = CovarianceModel::full(repair_psd(sample_mse(R), kind), kind);
    } else if (kind == "t-acov") {
        if (N <= ts.m)
            singular(kind, "N > m", N, ts.m);
        Triplets t;
        for (int level = 0; level < ts.p(); ++level) {
            const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
            const Index off = ts.level_offset(level);
            std::vector<Index> idx(static_cast<size_t>(Mk));
            for (Index l = 0; l < Mk; ++l)
                idx[static_cast<size_t>(l)] = off + l;
            add_block(t, idx, repair_psd(sample_mse(R.middleRows(off, Mk)), kind));
        }
        out = CovarianceModel::block(from_triplets(T, t), kind);
    } else {
        VectorXd d = kind == "t-strar1" ? struc : kind == "t-sar1" ? per_level_variance(R, ts) : wlsh;
        Triplets t;
        std::vector<double> rho;
        for (int level = 0; level < ts.p(); ++level) {
            const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
            const Index off = ts.level_offset(level);
            double r = 0.0;
            if (level > 0) {
                r = lag1_autocorrelation(level_sequence(R, ts, level));
                rho.push_back(r);
            }
            std::vector<Index> idx(static_cast<size_t>(Mk));
            for (Index l = 0; l < Mk; ++l)
                idx[static_cast<size_t>(l)] = off + l;
            add_block(t, idx, markov_block(d.segment(off, Mk), r));
        }
        out = CovarianceModel::block(from_triplets(T, t), kind);
        out.rho = std::move(rho);
    }
    require_spd(out);
    return out;
}

CovarianceModel cross_temporal_cov(const std::string &kind, const CrossSectionalStructure &cs,
                                   const TemporalStructure &ts, const std::optional<ResidualTableau> &E) {
    const Index n = cs.n();
    const Index T = ts.total();
    const Index dim = n * T;
    CovarianceModel out;
    auto level_of = [&](Index r) {
        int level = 0;
        while (level + 1 < ts.p() && ts.level_offset(level + 1) <= r)
            ++level;
        return level;
    };

    if (kind == "oct-ols") {
        out = CovarianceModel::identity(dim, kind);
        require_spd(out);
        return out;
    }
    if (kind == "oct-struc") {
        const VectorXd s1 = cs.summing_matrix.rowwise().sum();
        VectorXd d(dim);
        for (Index r = 0; r < T; ++r)
            for (Index i = 0; i < n; ++i)
                d(r * n + i) = s1(i) * ts.factors[static_cast<size_t>(level_of(r))];
        out = CovarianceModel::diagonal_of(d, kind);
        require_spd(out);
        return out;
    }
    if (!is_oct_kind(kind))
        fail(ErrorKind::InvalidInput, "unknown cross-temporal covariance kind '" + kind + "'");
    if (!E)
        fail(ErrorKind::InvalidInput, kind + " requires in-sample residuals");
    if (E->ordering != ResidualTableau::Ordering::ByTime)
        fail(ErrorKind::OrderingMismatch, kind + ": residual rows must follow the by-time tableau order");
    if (E->n != n)
        fail(ErrorKind::DimensionMismatch, kind + ": residuals cover " + std::to_string(E->n) + " series, expected " +
                                               std::to_string(n));
    E->validate(ts);
    const Index N = E->N();
    if (N < 2)
        fail(ErrorKind::InvalidInput, kind + " requires at least 2 residual observations");
    const MatrixXd &R = E->E;

    if (kind == "oct-wlsh") {
        out = CovarianceModel::diagonal_of(R.rowwise().squaredNorm() / static_cast<double>(N), kind);
    } else if (kind == "oct-wlsv") {
        VectorXd d(dim);
        for (Index i = 0; i < n; ++i) {
            const VectorXd v = per_level_variance(E->series(ts, i), ts);
            for (Index r = 0; r < T; ++r)
                d(r * n + i) = v(r);
        }
        out = CovarianceModel::diagonal_of(d, kind);
    } else if (kind == "oct-bdsam" || kind == "oct-bdshr" || kind == "oct-bdsam-l") {
        if (kind != "oct-bdshr" && N <= n)
            singular(kind, "N > n", N, n);
        Triplets t;
        std::vector<double> lambdas;
        for (int level = 0; level < ts.p(); ++level) {
            const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
            MatrixXd Wk;
            if (kind == "oct-bdsam") {
                Wk = repair_psd(sample_mse(E->level(ts, level)), kind);
            } else if (kind == "oct-bdshr") {
                ShrinkResult s = shrink(E->level(ts, level));
                Wk = std::move(s.matrix);
                lambdas.push_back(s.lambda);
            }
            for (Index l = 0; l < Mk; ++l) {
                const Index r = ts.level_offset(level) + l;
                std::vector<Index> idx(static_cast<size_t>(n));
                for (Index i = 0; i < n; ++i)
                    idx[static_cast<size_t>(i)] = r * n + i;
                if (kind == "oct-bdsam-l")
                    add_block(t, idx, repair_psd(sample_mse(E->node(ts, level, l)), kind));
                else
                    add_block(t, idx, Wk);
            }
        }
        out = CovarianceModel::block(from_triplets(dim, t), kind);
        out.lambda = std::move(lambdas);
    } else if (kind == "oct-acov") {
        if (N <= ts.m)
            singular(kind, "N > m", N, ts.m);
        Triplets t;
        for (Index i = 0; i < n; ++i) {
            const MatrixXd Ex = E->series(ts, i);
            for (int level = 0; level < ts.p(); ++level) {
                const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
                const Index off = ts.level_offset(level);
                std::vector<Index> idx(static_cast<size_t>(Mk));
                for (Index l = 0; l < Mk; ++l)
                    idx[static_cast<size_t>(l)] = (off + l) * n + i;
                add_block(t, idx, repair_psd(sample_mse(Ex.middleRows(off, Mk)), kind));
            }
        }
        out = CovarianceModel::block(from_triplets(dim, t), kind);
    } else if (kind == "oct-shr") {
        ShrinkResult s = shrink(R);
        out = CovarianceModel::full(std::move(s.matrix), kind);
        out.lambda = {s.lambda};
    } else { // oct-sam
        if (N <= dim)
            singular(kind, "N > n(k*+m)", N, dim);
        out = CovarianceModel::full(repair_psd(sample_mse(R), kind), kind);
    }
    require_spd(out);
    return out;
}

namespace {

CovarianceModel remap(const CovarianceModel &src, Index dim, Index h, const std::function<Index(Index, Index)> &index) {
    CovarianceModel out;
    out.kind = src.kind;
    out.lambda = src.lambda;
    out.rho = src.rho;
    if (src.structure == CovStructure::Full && h == 1) {
        out.structure = CovStructure::Full;
        out.dense.resize(dim, dim);
        for (Index b = 0; b < src.dense.cols(); ++b)
            for (Index a = 0; a < src.dense.rows(); ++a)
                out.dense(index(0, a), index(0, b)) = src.dense(a, b);
        return out;
    }
    const SpMat S = src.to_sparse();
    Triplets t;
    t.reserve(static_cast<size_t>(S.nonZeros() * h));
    for (Index c = 0; c < h; ++c)
        for (Index j = 0; j < S.outerSize(); ++j)
            for (SpMat::InnerIterator it(S, j); it; ++it)
                t.emplace_back(index(c, it.row()), index(c, it.col()), it.value());
    out.sparse = from_triplets(dim, t);
    out.structure = src.structure == CovStructure::Full ? CovStructure::BlockDiagonal : src.structure;
    return out;
}

} // namespace

CovarianceModel expand_temporal(const CovarianceModel &omega, const TemporalStructure &ts, Index h) {
    if (omega.dim() != ts.total())
        fail(ErrorKind::DimensionMismatch, "temporal model has dimension " + std::to_string(omega.dim()) +
                                               ", expected " + std::to_string(ts.total()));
    const auto map = cycle_column_map(ts, h);
    const Index T = ts.total();
    return remap(omega, h * T, h, [&](Index c, Index r) { return map[static_cast<size_t>(c * T + r)]; });
}

CovarianceModel expand_cross_temporal(const CovarianceModel &W, const CrossTemporalStructure &xts) {
    const Index n = xts.n;
    const Index T = xts.ts.total();
    if (W.dim() != n * T)
        fail(ErrorKind::DimensionMismatch, "cross-temporal model has dimension " + std::to_string(W.dim()) +
                                               ", expected n(k*+m) = " + std::to_string(n * T));
    const auto map = cycle_column_map(xts.ts, xts.h);
    const Index L = xts.cols();
    return remap(W, xts.dim(), xts.h, [&](Index c, Index a) {
        const Index r = a / n, i = a % n;
        return i * L + map[static_cast<size_t>(c * T + r)];
    });
}

} // namespace ctrec
