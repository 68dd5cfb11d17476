#include "ctrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <atomic>
#include <mutex>
#include <thread>

namespace ctrec {

Measure parse_measure(const std::string &s) {
    if (s == "mse" || s == "MSE")
        return Measure::MSE;
    if (s == "mae" || s == "MAE")
        return Measure::MAE;
    if (s == "rmse" || s == "RMSE")
        return Measure::RMSE;
    fail(ErrorKind::InvalidInput, "unknown measure '" + s + "'");
}

const char *to_string(Measure m) {
    switch (m) {
    case Measure::MSE:
        return "mse";
    case Measure::MAE:
        return "mae";
    case Measure::RMSE:
        return "rmse";
    }
    return "?";
}

ErrorCube::ErrorCube(std::vector<std::string> procedures, Index n, Index n_a, const TemporalStructure &ts, Index h,
                     Index origins)
    : names_(std::move(procedures)), n_(n), n_a_(n_a), h_(h), q_(origins), ts_(ts), factors_(ts.factors) {
    if (names_.empty())
        fail(ErrorKind::InvalidInput, "error cube needs the benchmark procedure");
    if (origins < 1)
        fail(ErrorKind::InvalidInput, "error cube needs at least one origin");
    for (int k : factors_)
        horizons_.push_back(ts.M(k) * h);
    data_.resize(names_.size());
    for (auto &per_level : data_)
        for (Index hk : horizons_)
            per_level.push_back(MatrixXd::Zero(n_ * hk, q_));
}

Index ErrorCube::procedure_index(const std::string &name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        fail(ErrorKind::InvalidInput, "unknown procedure '" + name + "'");
    return it - names_.begin();
}

double &ErrorCube::at(Index j, Index i, int level, Index hz, Index t) {
    return data_[static_cast<size_t>(j)][static_cast<size_t>(level)](i * horizons(level) + hz, t);
}

double ErrorCube::at(Index j, Index i, int level, Index hz, Index t) const {
    return data_[static_cast<size_t>(j)][static_cast<size_t>(level)](i * horizons(level) + hz, t);
}

void ErrorCube::record(Index j, Index t, const MatrixXd &actual, const MatrixXd &forecast) {
    if (actual.rows() != forecast.rows() || actual.cols() != forecast.cols())
        fail(ErrorKind::DimensionMismatch, "actual and forecast tableaux differ in shape");
    record_errors(j, t, actual - forecast);
}

void ErrorCube::record_errors(Index j, Index t, const MatrixXd &errors) {
    if (errors.rows() != n_ || errors.cols() != h_ * ts_.total())
        fail(ErrorKind::DimensionMismatch, "error tableau shape does not match the cube");
    if (j < 0 || j >= procedures() || t < 0 || t >= q_)
        fail(ErrorKind::InvalidInput, "procedure or origin out of range");
    for (int level = 0; level < levels(); ++level) {
        const Index first = ts_.level_offset(level) * h_;
        for (Index i = 0; i < n_; ++i)
            for (Index hz = 0; hz < horizons(level); ++hz)
                at(j, i, level, hz, t) = errors(i, first + hz);
    }
}

double accuracy_index(const ErrorCube &cube, Measure measure, Index i, Index j, int level, Index hz) {
    double acc = 0.0;
    for (Index t = 0; t < cube.origins(); ++t) {
        const double e = cube.at(j, i, level, hz, t);
        acc += measure == Measure::MAE ? std::abs(e) : e * e;
    }
    acc /= static_cast<double>(cube.origins());
    return measure == Measure::RMSE ? std::sqrt(acc) : acc;
}

double relative_index(const ErrorCube &cube, Measure measure, Index i, Index j, int level, Index hz) {
    const double a = accuracy_index(cube, measure, i, j, level, hz);
    const double b = accuracy_index(cube, measure, i, 0, level, hz);
    if (b == 0.0) {
        if (a == 0.0)
            return 1.0;
        fail(ErrorKind::BenchmarkZero, "benchmark accuracy is zero for series " + std::to_string(i) + ", k=" +
                                           std::to_string(cube.factor(level)) + ", h=" + std::to_string(hz + 1));
    }
    return a / b;
}

Selection select_all() { return {}; }

Selection select_uppers(const ErrorCube &cube) {
    Selection s;
    for (Index i = 0; i < cube.uppers(); ++i)
        s.series.push_back(i);
    return s;
}

Selection select_bottoms(const ErrorCube &cube) {
    Selection s;
    for (Index i = cube.uppers(); i < cube.series(); ++i)
        s.series.push_back(i);
    return s;
}

AvgRel avg_rel(const ErrorCube &cube, Measure measure, const Selection &sel, Index j) {
    std::vector<Index> series = sel.series;
    if (series.empty())
        for (Index i = 0; i < cube.series(); ++i)
            series.push_back(i);
    std::vector<int> levels = sel.levels;
    if (levels.empty())
        for (int l = 0; l < cube.levels(); ++l)
            levels.push_back(l);
    double log_sum = 0.0;
    Index count = 0;
    for (int level : levels) {
        if (level < 0 || level >= cube.levels())
            fail(ErrorKind::InvalidInput, "level out of range");
        Index lo = 0, hi = cube.horizons(level) - 1;
        if (sel.horizons) {
            lo = std::max<Index>(lo, sel.horizons->first - 1);
            hi = std::min<Index>(hi, sel.horizons->second - 1);
        }
        for (Index i : series) {
            if (i < 0 || i >= cube.series())
                fail(ErrorKind::InvalidInput, "series out of range");
            for (Index hz = lo; hz <= hi; ++hz) {
                log_sum += std::log(relative_index(cube, measure, i, j, level, hz));
                ++count;
            }
        }
    }
    if (count == 0)
        fail(ErrorKind::EmptySelection, "selection contains no cells");
    return {std::exp(log_sum / static_cast<double>(count)), count};
}

double avg_rel_index(const ErrorCube &cube, Measure measure, const Selection &sel, Index j) {
    return avg_rel(cube, measure, sel, j).value;
}

AccuracyTable table1(const ErrorCube &cube, Measure measure) {
    AccuracyTable t;
    t.header = {"group", "procedure"};
    struct Column {
        int level;
        std::optional<std::pair<Index, Index>> range;
    };
    std::vector<Column> cols;
    // lowest frequency last in storage; the table starts from k = 1
    for (int level = cube.levels() - 1; level >= 0; --level) {
        const std::string k = "k" + std::to_string(cube.factor(level));
        const Index hk = cube.horizons(level);
        for (Index hz = 1; hz <= hk; ++hz) {
            t.header.push_back(k + "_h" + std::to_string(hz));
            cols.push_back({level, std::make_pair(hz, hz)});
        }
        if (hk > 1) {
            t.header.push_back(k + "_h1-" + std::to_string(hk));
            cols.push_back({level, std::make_pair(Index(1), hk)});
        }
    }
    t.header.push_back("all");
    const std::vector<std::pair<std::string, Selection>> groups = {
        {"all", select_all()}, {"upper", select_uppers(cube)}, {"bottom", select_bottoms(cube)}};
    for (const auto &[gname, gsel] : groups) {
        if (gsel.series.empty() && gname != "all")
            continue;
        for (Index j = 0; j < cube.procedures(); ++j) {
            AccuracyTable::Row row{gname, cube.names()[static_cast<size_t>(j)], {}};
            for (const auto &c : cols) {
                Selection s = gsel;
                s.levels = {c.level};
                s.horizons = c.range;
                row.values.push_back(avg_rel_index(cube, measure, s, j));
            }
            row.values.push_back(avg_rel_index(cube, measure, gsel, j));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

namespace {
std::string num(double v, const char *fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}
} // namespace

void write_table_csv(std::ostream &os, const AccuracyTable &t) {
    for (size_t c = 0; c < t.header.size(); ++c)
        os << (c ? "," : "") << t.header[c];
    os << '\n';
    for (const auto &r : t.rows) {
        os << r.group << ',' << r.procedure;
        for (double v : r.values)
            os << ',' << num(v, "%.17g");
        os << '\n';
    }
}

void write_table_text(std::ostream &os, const AccuracyTable &t) {
    std::vector<size_t> width(t.header.size());
    for (size_t c = 0; c < t.header.size(); ++c)
        width[c] = std::max<size_t>(t.header[c].size(), 9);
    for (const auto &r : t.rows)
        width[1] = std::max(width[1], r.procedure.size());
    auto pad = [&](const std::string &s, size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };
    for (size_t c = 0; c < t.header.size(); ++c)
        os << (c ? " " : "") << pad(t.header[c], width[c]);
    os << '\n';
    for (const auto &r : t.rows) {
        os << pad(r.group, width[0]) << ' ' << pad(r.procedure, width[1]);
        for (size_t c = 0; c < r.values.size(); ++c) {
            const double v = r.values[c];
            std::string cell = num((1.0 - v) * 100.0, "%.2f") + (v > 1.0 ? "*" : " ");
            os << ' ' << pad(cell, width[c + 2]);
        }
        os << '\n';
    }
}

HarnessResult rolling_harness(const std::vector<OriginData> &origins, const std::vector<Procedure> &procedures,
                              const CrossTemporalStructure &xts, const HarnessConfig &config) {
    std::vector<std::string> names{"base"};
    for (const auto &p : procedures)
        names.push_back(p.name);
    const Index n_a = xts.cs ? xts.cs->n_a : 0;
    HarnessResult out{ErrorCube(names, xts.n, n_a, xts.ts, xts.h, static_cast<Index>(origins.size())), {}};
    out.report.origins = static_cast<Index>(origins.size());
    out.report.procedures = names;

    std::mutex mu;
    std::exception_ptr first_error;
    double worst = 0.0;
    auto work = [&](size_t t) {
        const OriginData &o = origins[t];
        std::vector<MatrixXd> forecasts;
        double local = 0.0;
        for (const auto &p : procedures) {
            forecasts.push_back(p.run(o, xts));
            local = std::max(local, kernel_violation(forecasts.back(), xts));
        }
        std::lock_guard<std::mutex> lock(mu);
        out.cube.record(0, static_cast<Index>(t), o.actual, o.base);
        for (size_t j = 0; j < forecasts.size(); ++j)
            out.cube.record(static_cast<Index>(j + 1), static_cast<Index>(t), o.actual, forecasts[j]);
        worst = std::max(worst, local);
    };
    const unsigned jobs = std::max(1u, config.jobs);
    if (jobs == 1) {
        for (size_t t = 0; t < origins.size(); ++t)
            work(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (unsigned w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (size_t t; (t = next++) < origins.size();) {
                    try {
                        work(t);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(mu);
                        if (!first_error)
                            first_error = std::current_exception();
                    }
                }
            });
        for (auto &th : pool)
            th.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }
    out.report.max_coherence_violation = worst;
    return out;
}

} // namespace ctrec
