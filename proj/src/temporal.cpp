#include "ctrec/temporal.hpp"

#include <algorithm>

#include "ctrec/errors.hpp"

namespace ctrec {

std::vector<int> divisors_desc(int m) {
    std::vector<int> out;
    for (int k = m; k >= 1; --k)
        if (m % k == 0)
            out.push_back(k);
    return out;
}

int TemporalStructure::level_index(int k) const {
    auto it = std::find(factors.begin(), factors.end(), k);
    if (it == factors.end())
        fail(ErrorKind::NotAFactor, std::to_string(k) + " is not in the factor set of m=" + std::to_string(m));
    return static_cast<int>(it - factors.begin());
}

Index TemporalStructure::level_offset(int level) const {
    Index off = 0;
    for (int j = 0; j < level; ++j)
        off += M(factors[static_cast<size_t>(j)]);
    return off;
}

TemporalStructure build_temporal(int m, const std::optional<std::vector<int>> &whitelist) {
    if (m < 1)
        fail(ErrorKind::InvalidInput, "m must be a positive integer");
    TemporalStructure ts;
    ts.m = m;
    if (whitelist) {
        std::vector<int> f = *whitelist;
        std::sort(f.begin(), f.end(), std::greater<>());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        for (int k : f)
            if (k < 1 || m % k != 0)
                fail(ErrorKind::NotAFactor, std::to_string(k) + " does not divide m=" + std::to_string(m));
        if (f.empty() || f.front() != m || f.back() != 1)
            fail(ErrorKind::InvalidInput, "factor whitelist must contain m and 1");
        ts.factors = std::move(f);
    } else {
        ts.factors = divisors_desc(m);
    }

    for (int k : ts.factors)
        if (k != 1)
            ts.k_star += m / k;

    ts.K1 = MatrixXd::Zero(ts.k_star, m);
    Index row = 0;
    for (int k : ts.factors) {
        if (k == 1)
            continue;
        for (int l = 0; l < m / k; ++l, ++row)
            ts.K1.block(row, l * k, 1, k).setOnes();
    }
    ts.R1.resize(ts.k_star + m, m);
    ts.R1 << ts.K1, MatrixXd::Identity(m, m);
    ts.Z1.resize(ts.k_star, ts.k_star + m);
    ts.Z1 << MatrixXd::Identity(ts.k_star, ts.k_star), -ts.K1;
    return ts;
}

VectorXd aggregate_series(const VectorXd &x, int k, int m) {
    if (k < 1 || m < 1 || m % k != 0)
        fail(ErrorKind::NotAFactor, std::to_string(k) + " does not divide m=" + std::to_string(m));
    if (x.size() % m != 0)
        fail(ErrorKind::RaggedEdge, "series length " + std::to_string(x.size()) + " is not a multiple of m=" +
                                        std::to_string(m));
    const Index n_out = x.size() / k;
    VectorXd out(n_out);
    for (Index l = 0; l < n_out; ++l)
        out(l) = x.segment(l * k, k).sum();
    return out;
}

VectorXd temporal_aggregates(const TemporalStructure &ts, const VectorXd &x) {
    if (x.size() % ts.m != 0)
        fail(ErrorKind::RaggedEdge, "series length is not a multiple of m");
    const Index N = x.size() / ts.m;
    VectorXd out(N * ts.total());
    Index pos = 0;
    for (int k : ts.factors) {
        VectorXd agg = aggregate_series(x, k, ts.m);
        out.segment(pos, agg.size()) = agg;
        pos += agg.size();
    }
    return out;
}

MatrixXd full_temporal_aggregation(const TemporalStructure &ts, Index N) {
    if (N < 1)
        fail(ErrorKind::InvalidInput, "number of cycles must be positive");
    MatrixXd K = MatrixXd::Zero(N * ts.k_star, N * ts.m);
    Index row = 0;
    for (int k : ts.factors) {
        if (k == 1)
            continue;
        for (Index l = 0; l < N * ts.M(k); ++l, ++row)
            K.block(row, l * k, 1, k).setOnes();
    }
    return K;
}

MatrixXd build_full_temporal_kernel(const TemporalStructure &ts, Index N) {
    MatrixXd K = full_temporal_aggregation(ts, N);
    MatrixXd Z(K.rows(), K.rows() + K.cols());
    Z << MatrixXd::Identity(K.rows(), K.rows()), -K;
    return Z;
}

MatrixXd full_temporal_summing(const TemporalStructure &ts, Index N) {
    MatrixXd K = full_temporal_aggregation(ts, N);
    MatrixXd R(K.rows() + K.cols(), K.cols());
    R << K, MatrixXd::Identity(K.cols(), K.cols());
    return R;
}

std::vector<Index> cycle_column_map(const TemporalStructure &ts, Index h) {
    std::vector<Index> map(static_cast<size_t>(h * ts.total()));
    for (Index c = 0; c < h; ++c) {
        Index r = 0;
        for (int level = 0; level < ts.p(); ++level) {
            const Index Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
            for (Index l = 0; l < Mk; ++l, ++r)
                map[static_cast<size_t>(c * ts.total() + r)] = ts.column(level, c, l, h);
        }
    }
    return map;
}

} // namespace ctrec
