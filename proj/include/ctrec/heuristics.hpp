#pragma once

#include <string>
#include <vector>

#include "ctrec/errors.hpp"
#include "ctrec/reconcile.hpp"

namespace ctrec {

enum class Order { TemporalFirst, CrossSectionalFirst };
enum class Average { Plain, Weighted };

struct HeuristicConfig {
    std::string temporal_kind = "t-wlsv";
    std::string cross_sectional_kind = "cs-shr";
    Order order = Order::TemporalFirst;
    Average average = Average::Plain;
    double tolerance = 1e-6;
    int max_iterations = 100;

    void validate() const;
};

struct KaResult {
    ReconciliationResult result;
    MatrixXd averaged_projector; // n x n (temporal-first) or h(k*+m) square (cross-sectional-first)
};

KaResult ka_two_step(const MatrixXd &Y_hat, const CrossTemporalStructure &xts, const HeuristicConfig &config,
                     const std::optional<ResidualTableau> &residuals = std::nullopt);

struct TraceEntry {
    int iteration = 0;       // 0 for the base forecasts
    std::string step;        // "base", "temporal" or "cross-sectional"
    double d_cs = 0.0;
    double d_te = 0.0;
};

struct IterativeResult {
    ReconciliationResult result;
    std::vector<TraceEntry> trace;
    int iterations = 0;
    double scale = 1.0; // 1 + max|Y_hat|; the stopping threshold is tolerance * scale
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string &what, std::vector<TraceEntry> trace)
        : Error(ErrorKind::NonConvergence, what), trace_(std::move(trace)) {}
    const std::vector<TraceEntry> &trace() const { return trace_; }

private:
    std::vector<TraceEntry> trace_;
};

IterativeResult iterative(const MatrixXd &Y_hat, const CrossTemporalStructure &xts, const HeuristicConfig &config,
                          const std::optional<ResidualTableau> &residuals = std::nullopt);

// L2 distance of each KA order's output to the base forecasts, for choosing between them.
struct OrderDistances {
    double temporal_first = 0.0;
    double cross_sectional_first = 0.0;
};

OrderDistances ka_order_distances(const MatrixXd &Y_hat, const CrossTemporalStructure &xts,
                                  const HeuristicConfig &config,
                                  const std::optional<ResidualTableau> &residuals = std::nullopt);

} // namespace ctrec
