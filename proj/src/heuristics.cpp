#include "ctrec/heuristics.hpp"

#include <cmath>

namespace ctrec {

namespace {

struct Stages {
    std::vector<Projector> temporal;     // one shared, or one per series
    std::vector<Projector> cross_levels; // one shared, or one per level
};

Stages build_stages(const CrossTemporalStructure &xts, const HeuristicConfig &cfg,
                    const std::optional<ResidualTableau> &residuals) {
    const auto &cs = xts.cross_sectional();
    Stages s;
    const SpMat Zh = build_full_temporal_kernel(xts.ts, xts.h).sparseView();
    const auto omegas = per_series_t_models(cfg.temporal_kind, xts.ts, xts.n, residuals);
    if (xts.ts.k_star > 0)
        for (const auto &omega : omegas)
            s.temporal.emplace_back(Zh, expand_temporal(omega, xts.ts, xts.h));
    const SpMat Ut = cs.kernel.sparseView();
    for (const auto &w : per_level_cs_models(cfg.cross_sectional_kind, cs, xts.ts, residuals))
        s.cross_levels.emplace_back(Ut, w);
    return s;
}

MatrixXd temporal_step(const MatrixXd &Y, const Stages &s) {
    if (s.temporal.empty())
        return Y;
    if (s.temporal.size() == 1)
        return s.temporal[0].apply_columns(Y.transpose()).transpose();
    MatrixXd out(Y.rows(), Y.cols());
    for (Index i = 0; i < Y.rows(); ++i)
        out.row(i) = s.temporal[static_cast<size_t>(i)].apply(Y.row(i).transpose()).transpose();
    return out;
}

MatrixXd cross_step(const MatrixXd &Y, const Stages &s, const TemporalStructure &ts, Index h) {
    MatrixXd out = Y;
    for (int level = 0; level < ts.p(); ++level) {
        const auto &proj = s.cross_levels.size() == 1 ? s.cross_levels[0] : s.cross_levels[static_cast<size_t>(level)];
        const Index width = h * ts.M(ts.factors[static_cast<size_t>(level)]);
        const Index first = ts.level_offset(level) * h;
        out.middleCols(first, width) = proj.apply_columns(Y.middleCols(first, width));
    }
    return out;
}

SolveDiagnostics worst(const Stages &s) {
    SolveDiagnostics d;
    auto take = [&](const Projector &p) {
        if (p.diagnostics().condition_estimate > d.condition_estimate)
            d.condition_estimate = p.diagnostics().condition_estimate;
        d.ill_conditioned = d.ill_conditioned || p.diagnostics().ill_conditioned;
    };
    for (const auto &p : s.temporal)
        take(p);
    for (const auto &p : s.cross_levels)
        take(p);
    return d;
}

ReconciliationResult finish(const MatrixXd &Y_hat, MatrixXd Y, const CrossTemporalStructure &xts, std::string tag,
                            SolveDiagnostics diag) {
    ReconciliationResult r;
    r.adjustment = Y_hat - Y;
    r.reconciled.values = std::move(Y);
    r.reconciled.provenance = std::move(tag);
    r.coherency_errors_before = -(xts.kernel * ForecastTableau{Y_hat, ""}.vec_by_variable());
    r.diagnostics = diag;
    return r;
}

} // namespace

void HeuristicConfig::validate() const {
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        fail(ErrorKind::InvalidInput, "tolerance must be finite and positive");
    if (max_iterations < 1)
        fail(ErrorKind::InvalidInput, "max_iterations must be at least 1");
    if (!is_t_kind(temporal_kind))
        fail(ErrorKind::InvalidInput, "unknown temporal kind '" + temporal_kind + "'");
    if (!is_cs_kind(cross_sectional_kind))
        fail(ErrorKind::InvalidInput, "unknown cross-sectional kind '" + cross_sectional_kind + "'");
}

KaResult ka_two_step(const MatrixXd &Y_hat, const CrossTemporalStructure &xts, const HeuristicConfig &config,
                     const std::optional<ResidualTableau> &residuals) {
    config.validate();
    if (Y_hat.rows() != xts.n || Y_hat.cols() != xts.cols())
        fail(ErrorKind::DimensionMismatch, "tableau shape does not match structure");
    const auto &ts = xts.ts;
    const Stages s = build_stages(xts, config, residuals);
    KaResult out;
    MatrixXd Y;
    std::string tag;
    if (config.order == Order::TemporalFirst) {
        const MatrixXd Ycheck = temporal_step(Y_hat, s);
        MatrixXd Mbar = MatrixXd::Zero(xts.n, xts.n);
        for (int level = 0; level < ts.p(); ++level) {
            const auto &proj = s.cross_levels.size() == 1 ? s.cross_levels[0] : s.cross_levels[static_cast<size_t>(level)];
            const double w = config.average == Average::Weighted
                                 ? static_cast<double>(ts.M(ts.factors[static_cast<size_t>(level)])) /
                                       static_cast<double>(ts.total())
                                 : 1.0 / ts.p();
            Mbar += w * proj.matrix();
        }
        Y = Mbar * Ycheck;
        out.averaged_projector = std::move(Mbar);
        tag = "ka-tcs";
    } else {
        const MatrixXd Ybreve = cross_step(Y_hat, s, ts, xts.h);
        const Index L = xts.cols();
        MatrixXd Mbar = MatrixXd::Zero(L, L);
        if (s.temporal.empty()) {
            Mbar.setIdentity();
        } else if (s.temporal.size() == 1) {
            Mbar = s.temporal[0].matrix();
        } else {
            for (const auto &p : s.temporal)
                Mbar += p.matrix();
            Mbar /= static_cast<double>(s.temporal.size());
        }
        Y = Ybreve * Mbar.transpose();
        out.averaged_projector = std::move(Mbar);
        tag = "ka-cst";
    }
    tag += "-" + config.temporal_kind + "-" + config.cross_sectional_kind;
    out.result = finish(Y_hat, std::move(Y), xts, tag, worst(s));
    return out;
}

IterativeResult iterative(const MatrixXd &Y_hat, const CrossTemporalStructure &xts, const HeuristicConfig &config,
                          const std::optional<ResidualTableau> &residuals) {
    config.validate();
    if (Y_hat.rows() != xts.n || Y_hat.cols() != xts.cols())
        fail(ErrorKind::DimensionMismatch, "tableau shape does not match structure");
    const Stages s = build_stages(xts, config, residuals);
    IterativeResult out;
    out.scale = 1.0 + (Y_hat.size() ? Y_hat.cwiseAbs().maxCoeff() : 0.0);
    const double threshold = config.tolerance * out.scale;

    auto record = [&](int it, const char *step, const MatrixXd &Y) {
        const CoherenceReport c = coherence_report(Y, xts);
        out.trace.push_back({it, step, c.d_cs, c.d_te});
        return c;
    };
    record(0, "base", Y_hat);

    MatrixXd Y = Y_hat;
    const bool temporal_first = config.order == Order::TemporalFirst;
    for (int it = 1; it <= config.max_iterations; ++it) {
        CoherenceReport c;
        if (temporal_first) {
            Y = temporal_step(Y, s);
            record(it, "temporal", Y);
            Y = cross_step(Y, s, xts.ts, xts.h);
            c = record(it, "cross-sectional", Y);
        } else {
            Y = cross_step(Y, s, xts.ts, xts.h);
            record(it, "cross-sectional", Y);
            Y = temporal_step(Y, s);
            c = record(it, "temporal", Y);
        }
        const double watched = temporal_first ? c.d_te : c.d_cs;
        if (watched < threshold) {
            out.iterations = it;
            out.result = finish(Y_hat, std::move(Y), xts,
                                std::string(temporal_first ? "ite-tcs-" : "ite-cst-") + config.temporal_kind + "-" +
                                    config.cross_sectional_kind,
                                worst(s));
            return out;
        }
    }
    throw NonConvergenceError("no convergence within " + std::to_string(config.max_iterations) + " iterations",
                              out.trace);
}

OrderDistances ka_order_distances(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                  const HeuristicConfig &config, const std::optional<ResidualTableau> &residuals) {
    HeuristicConfig c = config;
    OrderDistances d;
    c.order = Order::TemporalFirst;
    d.temporal_first = ka_two_step(Y_hat, xts, c, residuals).result.adjustment.norm();
    c.order = Order::CrossSectionalFirst;
    d.cross_sectional_first = ka_two_step(Y_hat, xts, c, residuals).result.adjustment.norm();
    return d;
}

} // namespace ctrec
