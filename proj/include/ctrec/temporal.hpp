#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ctrec {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Temporal hierarchy of one series over a cycle of m high-frequency periods.
// Per-cycle observations are ordered by descending aggregation order, then time.
struct TemporalStructure {
    int m = 1;
    std::vector<int> factors; // descending, factors.front() == m, factors.back() == 1
    Index k_star = 0;         // number of aggregated (non-unit factor) values per cycle
    MatrixXd K1;              // k_star x m
    MatrixXd R1;              // (k_star + m) x m
    MatrixXd Z1;              // k_star x (k_star + m), i.e. Z1' = [I | -K1]

    int p() const { return static_cast<int>(factors.size()); }
    Index total() const { return k_star + m; }
    Index M(int k) const { return m / k; }
    int level_index(int k) const; // position of k in factors, throws NotAFactor
    // First per-cycle column of the level at position `level`.
    Index level_offset(int level) const;
    // Column of (level, cycle c, index l within the cycle) inside an h-cycle block layout.
    Index column(int level, Index cycle, Index l, Index h) const {
        return level_offset(level) * h + cycle * M(factors[static_cast<size_t>(level)]) + l;
    }
};

// Divisors of m in descending order.
std::vector<int> divisors_desc(int m);

// `whitelist`, when given, must contain m and 1 and only divisors of m.
TemporalStructure build_temporal(int m, const std::optional<std::vector<int>> &whitelist = std::nullopt);

// Non-overlapping sums of k consecutive values. T must be a multiple of m.
VectorXd aggregate_series(const VectorXd &x, int k, int m);

// All aggregates of a raw series of N cycles, stacked level by level (descending k).
VectorXd temporal_aggregates(const TemporalStructure &ts, const VectorXd &x);

// K_N: stacked I_{N M_k} (x) 1_k' over the non-unit factors, (N k*) x (N m).
MatrixXd full_temporal_aggregation(const TemporalStructure &ts, Index N);

// Z_N' = [I | -K_N], (N k*) x (N (k*+m)).
MatrixXd build_full_temporal_kernel(const TemporalStructure &ts, Index N);

// R_N = [K_N; I], (N (k*+m)) x (N m).
MatrixXd full_temporal_summing(const TemporalStructure &ts, Index N);

// map[c * (k*+m) + r] = column in the h-cycle layout of per-cycle column r in cycle c.
std::vector<Index> cycle_column_map(const TemporalStructure &ts, Index h);

} // namespace ctrec
