#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ctrec/covariance.hpp"
#include "ctrec/crosstemporal.hpp"
#include "ctrec/errors.hpp"

namespace ctrec {

enum class Measure { MSE, MAE, RMSE };

Measure parse_measure(const std::string &s);
const char *to_string(Measure m);

// Errors e[j][level](i * h_k + hz, t) for procedure j, series i, horizon hz within level, origin t.
class ErrorCube {
public:
    ErrorCube(std::vector<std::string> procedures, Index n, Index n_a, const TemporalStructure &ts, Index h,
              Index origins);

    Index procedures() const { return static_cast<Index>(names_.size()); }
    Index series() const { return n_; }
    Index uppers() const { return n_a_; }
    Index origins() const { return q_; }
    int levels() const { return static_cast<int>(factors_.size()); }
    int factor(int level) const { return factors_[static_cast<size_t>(level)]; }
    Index horizons(int level) const { return horizons_[static_cast<size_t>(level)]; }
    const std::vector<std::string> &names() const { return names_; }
    Index procedure_index(const std::string &name) const;

    double &at(Index j, Index i, int level, Index hz, Index t);
    double at(Index j, Index i, int level, Index hz, Index t) const;

    // Stores actual - forecast for one origin; both tableaux are n x h(k*+m).
    void record(Index j, Index t, const MatrixXd &actual, const MatrixXd &forecast);
    void record_errors(Index j, Index t, const MatrixXd &errors);

    const TemporalStructure &temporal() const { return ts_; }
    Index cycles() const { return h_; }

private:
    std::vector<std::string> names_;
    Index n_, n_a_, h_, q_;
    TemporalStructure ts_;
    std::vector<int> factors_;
    std::vector<Index> horizons_;
    std::vector<std::vector<MatrixXd>> data_;
};

double accuracy_index(const ErrorCube &cube, Measure measure, Index i, Index j, int level, Index hz);
double relative_index(const ErrorCube &cube, Measure measure, Index i, Index j, int level, Index hz);

struct Selection {
    std::vector<Index> series;                     // empty means every series
    std::vector<int> levels;                       // level positions (0 = k = m); empty means every level
    std::optional<std::pair<Index, Index>> horizons; // 1-based inclusive, clipped to each level's h_k
};

Selection select_all();
Selection select_uppers(const ErrorCube &cube);
Selection select_bottoms(const ErrorCube &cube);

struct AvgRel {
    double value = 1.0;
    Index cells = 0;
};

AvgRel avg_rel(const ErrorCube &cube, Measure measure, const Selection &sel, Index j);
double avg_rel_index(const ErrorCube &cube, Measure measure, const Selection &sel, Index j);

// Table shaped as procedure x {per-level horizons, per-level range, All}, for groups all/upper/bottom.
struct AccuracyTable {
    std::vector<std::string> header;
    struct Row {
        std::string group;
        std::string procedure;
        std::vector<double> values;
    };
    std::vector<Row> rows;
};

AccuracyTable table1(const ErrorCube &cube, Measure measure);
void write_table_csv(std::ostream &os, const AccuracyTable &t);
// Percentage improvement (1 - AvgRel) * 100; cells with AvgRel > 1 are marked with '*'.
void write_table_text(std::ostream &os, const AccuracyTable &t);

struct OriginData {
    Index origin = 0;
    MatrixXd actual;
    MatrixXd base;
    std::optional<ResidualTableau> residuals;
};

struct Procedure {
    std::string name;
    std::function<MatrixXd(const OriginData &, const CrossTemporalStructure &)> run;
};

struct HarnessConfig {
    unsigned jobs = 1;
};

struct HarnessReport {
    Index origins = 0;
    std::vector<std::string> procedures;
    double max_coherence_violation = 0.0; // over all non-base procedures
};

struct HarnessResult {
    ErrorCube cube;
    HarnessReport report;
};

// Procedure 0 of the cube is always the base forecast itself.
HarnessResult rolling_harness(const std::vector<OriginData> &origins, const std::vector<Procedure> &procedures,
                              const CrossTemporalStructure &xts, const HarnessConfig &config = {});

} // namespace ctrec
