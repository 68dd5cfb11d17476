#include "ctrec/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ctrec {

SynthData generate_coherent(const CrossSectionalStructure &cs, const TemporalStructure &ts, Index cycles,
                            std::uint64_t seed, const NoiseSpec &noise) {
    if (cycles < 1)
        fail(ErrorKind::InvalidInput, "need at least one cycle");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const Index m = ts.m;
    const Index nb = cs.n_b;
    SynthData out;
    out.hf_bottom.resize(nb, cycles * m);
    for (Index b = 0; b < nb; ++b) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(b) / static_cast<double>(nb);
        for (Index t = 0; t < cycles * m; ++t) {
            double v;
            if (t < m)
                v = noise.level +
                    noise.seasonal_amplitude *
                        std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m) + phase);
            else
                v = out.hf_bottom(b, t - m) + noise.drift;
            if (noise.volatility != 0.0)
                v += noise.volatility * z(rng);
            out.hf_bottom(b, t) = v;
        }
    }
    const CrossTemporalStructure one = build_cross_temporal(cs, ts, 1);
    const VectorXd weight = cs.summing_matrix.rowwise().sum();
    for (Index c = 0; c < cycles; ++c) {
        MatrixXd a = bottom_up(out.hf_bottom.middleCols(c * m, m), one).values;
        MatrixXd o = a;
        if (noise.observation_noise != 0.0)
            for (int level = 0; level < ts.p(); ++level) {
                const int k = ts.factors[static_cast<size_t>(level)];
                for (Index l = 0; l < ts.M(k); ++l)
                    for (Index i = 0; i < cs.n(); ++i)
                        o(i, ts.level_offset(level) + l) +=
                            noise.observation_noise * std::sqrt(weight(i) * k) * z(rng);
            }
        out.actuals.push_back(std::move(a));
        out.observed.push_back(std::move(o));
    }
    return out;
}

BaseScheme parse_scheme(const std::string &s) {
    if (s == "seasonal-naive" || s == "snaive")
        return BaseScheme::SeasonalNaive;
    if (s == "mean")
        return BaseScheme::Mean;
    fail(ErrorKind::InvalidInput, "unknown base scheme '" + s + "'");
}

namespace {

void put_residual(ResidualTableau &r, Index col, const MatrixXd &e) {
    for (Index pos = 0; pos < e.cols(); ++pos)
        for (Index i = 0; i < r.n; ++i)
            r.E(pos * r.n + i, col) = e(i, pos);
}

MatrixXd spread(const MatrixXd &cycle, const TemporalStructure &ts, Index h) {
    const auto map = cycle_column_map(ts, h);
    const Index T = ts.total();
    MatrixXd Y(cycle.rows(), h * T);
    for (Index c = 0; c < h; ++c)
        for (Index r = 0; r < T; ++r)
            Y.col(map[static_cast<size_t>(c * T + r)]) = cycle.col(r);
    return Y;
}

} // namespace

BaseForecasts naive_base_forecasts(const SynthData &data, const TemporalStructure &ts, Index origin, Index h,
                                   BaseScheme scheme) {
    if (origin < 2 || origin > static_cast<Index>(data.observed.size()))
        fail(ErrorKind::InvalidInput, "origin must lie in [2, cycles]");
    if (h < 1)
        fail(ErrorKind::InvalidInput, "forecast horizon must be at least one cycle");
    const Index n = data.observed.front().rows();
    const Index T = ts.total();
    BaseForecasts out;
    out.residuals.n = n;
    MatrixXd point;
    if (scheme == BaseScheme::SeasonalNaive) {
        point = data.observed[static_cast<size_t>(origin - 1)];
        out.residuals.E.resize(n * T, origin - 1);
        for (Index t = 1; t < origin; ++t)
            put_residual(out.residuals, t - 1,
                         data.observed[static_cast<size_t>(t)] - data.observed[static_cast<size_t>(t - 1)]);
    } else {
        point = MatrixXd::Zero(n, T);
        for (Index t = 0; t < origin; ++t)
            point += data.observed[static_cast<size_t>(t)];
        point /= static_cast<double>(origin);
        out.residuals.E.resize(n * T, origin);
        for (Index t = 0; t < origin; ++t)
            put_residual(out.residuals, t, data.observed[static_cast<size_t>(t)] - point);
    }
    out.Y_hat = spread(point, ts, h);
    return out;
}

MatrixXd actual_tableau(const SynthData &data, const TemporalStructure &ts, Index origin, Index h) {
    return actual_tableau(data.actuals, ts, origin, h);
}

MatrixXd actual_tableau(const std::vector<MatrixXd> &cycles, const TemporalStructure &ts, Index origin, Index h) {
    if (origin < 0 || origin + h > static_cast<Index>(cycles.size()))
        fail(ErrorKind::InvalidInput, "not enough actual cycles after the origin");
    const Index n = cycles.front().rows();
    const auto map = cycle_column_map(ts, h);
    const Index T = ts.total();
    MatrixXd Y(n, h * T);
    for (Index c = 0; c < h; ++c)
        for (Index r = 0; r < T; ++r)
            Y.col(map[static_cast<size_t>(c * T + r)]) = cycles[static_cast<size_t>(origin + c)].col(r);
    return Y;
}

} // namespace ctrec
