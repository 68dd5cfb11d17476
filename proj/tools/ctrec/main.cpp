// ctrec: command-line front end for cross-temporal forecast reconciliation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ctrec/evaluation.hpp"
#include "ctrec/heuristics.hpp"
#include "ctrec/io.hpp"
#include "ctrec/reconcile.hpp"
#include "ctrec/synthgen.hpp"

namespace fs = std::filesystem;
using namespace ctrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonConvergence = 4;
constexpr const char *kEntrywiseRule = "max |U'Y|, |Z'Y'| <= 1e-09 (1 + max|Y|)";

std::ifstream open_in(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        fail(ErrorKind::FormatError, "cannot open '" + path + "'");
    return f;
}

std::ofstream open_out(const std::string &path) {
    const fs::path p(path);
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f)
        fail(ErrorKind::FormatError, "cannot write '" + path + "'");
    f.precision(17);
    return f;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os << std::setprecision(prec) << std::scientific << v;
    return os.str();
}

struct Inputs {
    io::HierarchySpec spec;
    TemporalStructure ts;
    Index h = 1;
    io::TableauSet forecasts;
    io::ResidualSet residuals;
    std::optional<CrossTemporalStructure> xts;
};

Inputs load_inputs(const std::string &hierarchy, const std::string &in, const std::string &residuals) {
    Inputs x;
    x.spec = io::read_hierarchy_file(hierarchy);
    x.ts = x.spec.temporal();
    auto f = open_in(in);
    x.forecasts = io::read_forecasts(f, in, x.spec.cs.labels, x.ts, &x.h);
    if (!residuals.empty()) {
        auto r = open_in(residuals);
        x.residuals = io::read_residuals(r, residuals, x.spec.cs.labels, x.ts);
    }
    x.xts = build_cross_temporal(x.spec.cs, x.ts, x.h);
    return x;
}

std::optional<ResidualTableau> residuals_for(const Inputs &x, Index origin) {
    if (x.residuals.empty())
        return std::nullopt;
    auto it = x.residuals.find(origin);
    if (it != x.residuals.end())
        return it->second;
    if (x.residuals.size() == 1 && x.residuals.begin()->first == 0)
        return x.residuals.begin()->second;
    fail(ErrorKind::InvalidEntry, "no residuals for origin " + std::to_string(origin));
}

bool keep_origin_column(const io::TableauSet &s) { return !(s.size() == 1 && s.begin()->first == 0); }

double tolerance_for(const MatrixXd &Y, double rel) { return rel * (1.0 + (Y.size() ? Y.cwiseAbs().maxCoeff() : 0.0)); }

struct OriginLine {
    Index origin;
    CoherenceReport before, after;
    double condition;
    bool ill;
    bool pass;
};

// Reconciled output: every constraint residual within 1e-9 (1 + max|Y|).
OriginLine line_entrywise(Index origin, const MatrixXd &base, const ReconciliationResult &r,
                          const CrossTemporalStructure &xts) {
    const CoherenceReport after = coherence_report(r.reconciled.values, xts);
    const double tol = tolerance_for(r.reconciled.values, 1e-9);
    return {origin, coherence_report(base, xts), after, r.diagnostics.condition_estimate, r.diagnostics.ill_conditioned,
            after.max_cs <= tol && after.max_te <= tol};
}

void print_report(std::ostream &os, const std::string &title, const std::vector<OriginLine> &lines, bool per_origin,
                  const std::string &rule) {
    double b_cs = 0, b_te = 0, a_cs = 0, a_te = 0, cond = 0;
    int ill = 0;
    bool ok = true;
    for (const auto &l : lines) {
        b_cs = std::max(b_cs, l.before.d_cs);
        b_te = std::max(b_te, l.before.d_te);
        a_cs = std::max(a_cs, l.after.d_cs);
        a_te = std::max(a_te, l.after.d_te);
        cond = std::max(cond, l.condition);
        ill += l.ill;
        ok = ok && l.pass;
    }
    os << title << '\n';
    os << "origins: " << lines.size() << '\n';
    os << "before: d_cs=" << fmt(b_cs) << " d_te=" << fmt(b_te) << '\n';
    os << "after:  d_cs=" << fmt(a_cs) << " d_te=" << fmt(a_te) << '\n';
    os << "condition estimate (max): " << fmt(cond) << (ill ? "  ill-conditioned origins: " + std::to_string(ill) : "")
       << '\n';
    os << "coherence (" << rule << "): " << (ok ? "pass" : "FAIL") << '\n';
    if (per_origin) {
        os << "origin,d_cs_before,d_te_before,d_cs_after,d_te_after,condition\n";
        for (const auto &l : lines)
            os << l.origin << ',' << fmt(l.before.d_cs) << ',' << fmt(l.before.d_te) << ',' << fmt(l.after.d_cs) << ','
               << fmt(l.after.d_te) << ',' << fmt(l.condition) << '\n';
    }
}

void emit_report(const std::string &out, const std::string &title, const std::vector<OriginLine> &lines,
                 const std::string &extra, const std::string &rule) {
    print_report(std::cout, title, lines, lines.size() <= 5, rule);
    std::cout << extra;
    auto f = open_out(out + ".report.txt");
    print_report(f, title, lines, true, rule);
    f << extra;
}

// ---- info ----

struct InfoOpts {
    std::string hierarchy;
    Index h = 1;
    std::string check;
    double rel_tol = 1e-9;
    std::optional<double> abs_tol;
};

int run_info(const InfoOpts &o) {
    const auto spec = io::read_hierarchy_file(o.hierarchy);
    const auto ts = spec.temporal();
    Index h = o.h;
    io::TableauSet set;
    if (!o.check.empty()) {
        auto f = open_in(o.check);
        set = io::read_forecasts(f, o.check, spec.cs.labels, ts, &h);
    }
    const auto xts = build_cross_temporal(spec.cs, ts, h);
    std::cout << "n_a: " << spec.cs.n_a << "\nn_b: " << spec.cs.n_b << "\nn: " << spec.cs.n() << "\nm: " << ts.m
              << "\nfactors:";
    for (int k : ts.factors)
        std::cout << ' ' << k;
    std::cout << "\nk*: " << ts.k_star << "\nforecast cycles: " << h << '\n';
    std::cout << "H': " << xts.kernel.rows() << " × " << xts.kernel.cols() << '\n';
    std::cout << "rank(H'): " << numerical_rank(MatrixXd(xts.kernel)) << '\n';
    if (set.empty())
        return kExitOk;
    bool ok = true;
    for (const auto &[origin, Y] : set) {
        const auto c = coherence_report(Y, xts);
        bool pass;
        if (o.abs_tol) {
            pass = c.d_cs < *o.abs_tol && c.d_te < *o.abs_tol;
            if (set.size() <= 5 || !pass)
                std::cout << "origin " << origin << ": d_cs=" << fmt(c.d_cs) << " d_te=" << fmt(c.d_te)
                          << " tol=" << fmt(*o.abs_tol) << (pass ? " pass" : " FAIL") << '\n';
        } else {
            const double tol = tolerance_for(Y, o.rel_tol);
            pass = c.max_cs <= tol && c.max_te <= tol;
            if (set.size() <= 5 || !pass)
                std::cout << "origin " << origin << ": max|U'Y|=" << fmt(c.max_cs) << " max|Z'Y'|=" << fmt(c.max_te)
                          << " tol=" << fmt(tol) << (pass ? " pass" : " FAIL") << '\n';
        }
        ok = ok && pass;
    }
    std::cout << "coherence check: " << (ok ? "pass" : "FAIL") << " (" << set.size() << " origins)\n";
    return ok ? kExitOk : kExitNumerical;
}

// ---- reconcile ----

struct ReconcileOpts {
    std::string method, in, residuals, hierarchy, out;
};

int run_reconcile(const ReconcileOpts &o) {
    const Inputs x = load_inputs(o.hierarchy, o.in, o.residuals);
    io::TableauSet out;
    std::vector<OriginLine> lines;
    for (const auto &[origin, Y] : x.forecasts) {
        const auto r = reconcile_method(o.method, Y, *x.xts, residuals_for(x, origin));
        lines.push_back(line_entrywise(origin, Y, r, *x.xts));
        out.emplace(origin, r.reconciled.values);
    }
    auto f = open_out(o.out);
    io::write_forecasts(f, x.spec.cs.labels, x.ts, x.h, out, keep_origin_column(x.forecasts));
    emit_report(o.out, "reconcile " + o.method, lines, "", kEntrywiseRule);
    return kExitOk;
}

// ---- heuristic ----

struct HeuristicOpts {
    std::string in, residuals, hierarchy, out;
    std::string temporal = "t-wlsv", cross = "cs-shr", order = "tcs";
    bool iterative = false, weighted = false;
    double delta = 1e-6;
    int max_iter = 100;
};

void write_trace(std::ostream &os, Index origin, const std::vector<TraceEntry> &trace) {
    for (const auto &e : trace)
        os << origin << ',' << e.iteration << ',' << e.step << ',' << io::format_number(e.d_cs) << ','
           << io::format_number(e.d_te) << '\n';
}

int run_heuristic(const HeuristicOpts &o) {
    HeuristicConfig cfg;
    cfg.temporal_kind = o.temporal;
    cfg.cross_sectional_kind = o.cross;
    if (o.order != "tcs" && o.order != "cst")
        fail(ErrorKind::InvalidInput, "order must be tcs or cst");
    cfg.order = o.order == "tcs" ? Order::TemporalFirst : Order::CrossSectionalFirst;
    cfg.average = o.weighted ? Average::Weighted : Average::Plain;
    cfg.tolerance = o.delta;
    cfg.max_iterations = o.max_iter;
    cfg.validate();

    const Inputs x = load_inputs(o.hierarchy, o.in, o.residuals);
    io::TableauSet out;
    std::vector<OriginLine> lines;
    std::ostringstream extra, trace;
    trace << "origin,iteration,step,d_cs,d_te\n";
    for (const auto &[origin, Y] : x.forecasts) {
        const auto res = residuals_for(x, origin);
        ReconciliationResult r;
        double l1_tol = 0.0;
        if (o.iterative) {
            try {
                IterativeResult it = iterative(Y, *x.xts, cfg, res);
                write_trace(trace, origin, it.trace);
                extra << "origin " << origin << ": converged after " << it.iterations << " iterations\n";
                l1_tol = o.delta * it.scale;
                r = std::move(it.result);
            } catch (const NonConvergenceError &e) {
                write_trace(trace, origin, e.trace());
                const std::string path = o.out + ".trace.csv";
                auto tf = open_out(path);
                tf << trace.str();
                std::cerr << "error: " << e.what() << " at origin " << origin << "; trace written to " << path << '\n';
                return kExitNonConvergence;
            }
        } else {
            r = ka_two_step(Y, *x.xts, cfg, res).result;
            const auto d = ka_order_distances(Y, *x.xts, cfg, res);
            extra << "origin " << origin << ": L2 distance to base tcs=" << fmt(d.temporal_first, 6)
                  << " cst=" << fmt(d.cross_sectional_first, 6) << '\n';
        }
        if (o.iterative) {
            const CoherenceReport after = coherence_report(r.reconciled.values, *x.xts);
            lines.push_back({origin, coherence_report(Y, *x.xts), after, r.diagnostics.condition_estimate,
                             r.diagnostics.ill_conditioned, after.d_cs < l1_tol && after.d_te < l1_tol});
            extra << "origin " << origin << ": L1 tolerance " << io::format_number(l1_tol) << '\n';
        } else {
            lines.push_back(line_entrywise(origin, Y, r, *x.xts));
        }
        out.emplace(origin, r.reconciled.values);
    }
    auto f = open_out(o.out);
    io::write_forecasts(f, x.spec.cs.labels, x.ts, x.h, out, keep_origin_column(x.forecasts));
    std::string tail = extra.str();
    if (o.iterative) {
        const std::string path = o.out + ".trace.csv";
        auto tf = open_out(path);
        tf << trace.str();
        tail += "trace: " + path + "\n";
        if (x.forecasts.size() <= 5)
            tail += trace.str();
    }
    const std::string title = std::string(o.iterative ? "iterative " : "ka ") + o.order + " " + o.temporal + " " +
                              o.cross + (o.weighted ? " weighted" : "");
    emit_report(o.out, title, lines, tail,
                o.iterative ? "d_cs, d_te < delta (1 + max|Y_hat|), see the L1 tolerance per origin" : kEntrywiseRule);
    return kExitOk;
}

// ---- evaluate ----

struct EvaluateOpts {
    std::string actuals, runs, hierarchy, benchmark = "base", measure = "mse", out;
    unsigned jobs = 1;
};

int run_evaluate(const EvaluateOpts &o) {
    std::string hier = o.hierarchy;
    if (hier.empty()) {
        const fs::path guess = fs::path(o.actuals).parent_path() / "hierarchy.csv";
        if (!fs::exists(guess))
            fail(ErrorKind::InvalidInput, "no --hierarchy given and no hierarchy.csv next to the actuals");
        hier = guess.string();
    }
    const auto spec = io::read_hierarchy_file(hier);
    const auto ts = spec.temporal();
    const Measure measure = parse_measure(o.measure);
    auto af = open_in(o.actuals);
    const auto actuals = io::read_actuals(af, o.actuals, spec.cs.labels, ts);

    std::map<std::string, io::TableauSet> runs;
    Index h = 0;
    if (!fs::is_directory(o.runs))
        fail(ErrorKind::InvalidInput, "'" + o.runs + "' is not a directory");
    for (const auto &entry : fs::directory_iterator(o.runs)) {
        const std::string name = entry.path().filename().string();
        // skip iterative traces written next to their forecasts
        if (entry.path().extension() != ".csv" || name.ends_with(".trace.csv"))
            continue;
        auto f = open_in(entry.path().string());
        Index hr = 0;
        runs.emplace(entry.path().stem().string(),
                     io::read_forecasts(f, entry.path().string(), spec.cs.labels, ts, &hr));
        if (h && hr != h)
            fail(ErrorKind::RaggedEdge, "forecast files cover different horizons");
        h = hr;
    }
    if (!runs.count(o.benchmark))
        fail(ErrorKind::InvalidInput, "benchmark '" + o.benchmark + "' not found in " + o.runs);
    const auto &bench = runs.at(o.benchmark);
    for (const auto &[name, set] : runs) {
        if (set.size() != bench.size())
            fail(ErrorKind::InvalidEntry, "'" + name + "' and the benchmark cover different origins");
        for (const auto &kv : bench)
            if (!set.count(kv.first))
                fail(ErrorKind::InvalidEntry, "'" + name + "' has no forecasts for origin " + std::to_string(kv.first));
    }
    const auto xts = build_cross_temporal(spec.cs, ts, h);
    std::vector<OriginData> origins;
    for (const auto &[origin, Y] : bench)
        origins.push_back({origin, actual_tableau(actuals, ts, origin, h), Y, std::nullopt});
    std::vector<Procedure> procs;
    for (const auto &[name, set] : runs) {
        if (name == o.benchmark)
            continue;
        const io::TableauSet *s = &set;
        procs.push_back({name, [s](const OriginData &d, const CrossTemporalStructure &) { return s->at(d.origin); }});
    }
    HarnessConfig hc;
    hc.jobs = o.jobs;
    HarnessResult hr = rolling_harness(origins, procs, xts, hc);
    // harness names the benchmark "base"
    AccuracyTable table = table1(hr.cube, measure);
    for (auto &row : table.rows)
        if (row.procedure == "base")
            row.procedure = o.benchmark;
    if (o.out.empty()) {
        write_table_csv(std::cout, table);
    } else {
        auto f = open_out(o.out);
        write_table_csv(f, table);
    }
    std::cout << "AvgRel" << to_string(measure) << " percentage improvement over '" << o.benchmark << "' ("
              << origins.size() << " origins; '*' marks a loss):\n";
    write_table_text(std::cout, table);
    return kExitOk;
}

// ---- synth ----

struct SynthOpts {
    std::string hierarchy, out, scheme = "seasonal-naive";
    Index cycles = 101, train = 10, h = 1;
    std::uint64_t seed = 1;
    NoiseSpec noise;
};

int run_synth(const SynthOpts &o) {
    const auto spec = io::read_hierarchy_file(o.hierarchy);
    const auto ts = spec.temporal();
    if (o.train < 3)
        fail(ErrorKind::InvalidInput, "--train must be at least 3 cycles");
    if (o.train + o.h > o.cycles)
        fail(ErrorKind::InvalidInput, "--cycles must exceed --train + --horizon - 1");
    const SynthData data = generate_coherent(spec.cs, ts, o.cycles, o.seed, o.noise);
    const BaseScheme scheme = parse_scheme(o.scheme);
    io::TableauSet base;
    io::ResidualSet res;
    for (Index t = o.train; t + o.h <= o.cycles; ++t) {
        BaseForecasts b = naive_base_forecasts(data, ts, t, o.h, scheme);
        base.emplace(t, std::move(b.Y_hat));
        res.emplace(t, std::move(b.residuals));
    }
    const fs::path dir(o.out);
    fs::create_directories(dir / "forecasts");
    {
        auto f = open_out((dir / "hierarchy.csv").string());
        io::write_hierarchy(f, spec);
    }
    {
        auto f = open_out((dir / "actuals.csv").string());
        io::write_actuals(f, spec.cs.labels, ts, data.actuals);
    }
    {
        auto f = open_out((dir / "forecasts" / "base.csv").string());
        io::write_forecasts(f, spec.cs.labels, ts, o.h, base, true);
    }
    {
        auto f = open_out((dir / "residuals.csv").string());
        io::write_residuals(f, spec.cs.labels, ts, res, true);
    }
    std::cout << "wrote " << o.cycles << " cycles, " << base.size() << " origins (" << o.train << ".."
              << (o.cycles - o.h) << ") to " << dir.string() << '\n';
    return kExitOk;
}

int exit_code_for(const Error &e) {
    if (e.kind() == ErrorKind::NonConvergence)
        return kExitNonConvergence;
    return is_numerical(e.kind()) ? kExitNumerical : kExitInput;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Cross-temporal forecast reconciliation"};
    app.set_config("--config", "", "key=value file mirroring the command-line flags");
    app.require_subcommand(1);

    InfoOpts info;
    auto *c_info = app.add_subcommand("info", "Describe a hierarchy and optionally check a forecast file for coherence");
    c_info->add_option("hierarchy", info.hierarchy, "Hierarchy file")->required();
    c_info->add_option("--horizon", info.h, "Forecast cycles for the kernel dimensions")->check(CLI::PositiveNumber);
    c_info->add_option("--check", info.check, "Forecast file to check");
    c_info->add_option("--rel-tol", info.rel_tol, "Entrywise tolerance relative to 1+max|Y|");
    c_info->add_option("--abs-tol", info.abs_tol, "Absolute tolerance on the L1 discrepancies d_cs, d_te");

    ReconcileOpts rec;
    auto *c_rec = app.add_subcommand("reconcile", "Reconcile base forecasts with bu, cs-*, t-* or oct-* methods");
    c_rec->add_option("--method", rec.method, "Method name")->required();
    c_rec->add_option("--in", rec.in, "Base forecast file")->required();
    c_rec->add_option("--residuals", rec.residuals, "In-sample residual file");
    c_rec->add_option("--hierarchy", rec.hierarchy, "Hierarchy file")->required();
    c_rec->add_option("--out", rec.out, "Output forecast file")->required();

    HeuristicOpts heu;
    auto *c_heu = app.add_subcommand("heuristic", "KA two-step and iterative cross-temporal reconciliation");
    c_heu->add_option("--temporal", heu.temporal, "Temporal covariance kind");
    c_heu->add_option("--cross-sectional", heu.cross, "Cross-sectional covariance kind");
    c_heu->add_option("--order", heu.order, "tcs or cst")->check(CLI::IsMember({"tcs", "cst"}));
    c_heu->add_flag("--iterative", heu.iterative, "Alternate the two steps until convergence");
    c_heu->add_option("--delta", heu.delta, "Convergence tolerance, scaled by 1+max|Y|");
    c_heu->add_option("--max-iter", heu.max_iter, "Iteration limit");
    c_heu->add_flag("--weighted-average", heu.weighted, "Weight levels by M_k when averaging projectors");
    c_heu->add_option("--in", heu.in, "Base forecast file")->required();
    c_heu->add_option("--residuals", heu.residuals, "In-sample residual file");
    c_heu->add_option("--hierarchy", heu.hierarchy, "Hierarchy file")->required();
    c_heu->add_option("--out", heu.out, "Output forecast file")->required();

    EvaluateOpts ev;
    auto *c_ev = app.add_subcommand("evaluate", "AvgRel accuracy tables over rolling origins");
    c_ev->add_option("--actuals", ev.actuals, "Actuals file")->required();
    c_ev->add_option("--runs", ev.runs, "Directory of per-procedure forecast files")->required();
    c_ev->add_option("--hierarchy", ev.hierarchy, "Hierarchy file (default: hierarchy.csv next to the actuals)");
    c_ev->add_option("--benchmark", ev.benchmark, "Benchmark procedure (file stem)");
    c_ev->add_option("--measure", ev.measure, "mse, mae or rmse")->check(CLI::IsMember({"mse", "mae", "rmse"}));
    c_ev->add_option("--out", ev.out, "CSV table output (default stdout)");
    c_ev->add_option("--jobs", ev.jobs, "Worker threads")->check(CLI::PositiveNumber);

    SynthOpts syn;
    auto *c_syn = app.add_subcommand("synth", "Generate a synthetic dataset with naive base forecasts");
    c_syn->add_option("--hierarchy", syn.hierarchy, "Hierarchy file")->required();
    c_syn->add_option("--cycles", syn.cycles, "Number of complete cycles")->check(CLI::PositiveNumber);
    c_syn->add_option("--seed", syn.seed, "Random seed");
    c_syn->add_option("--out", syn.out, "Output directory")->required();
    c_syn->add_option("--train", syn.train, "Cycles before the first origin");
    c_syn->add_option("--horizon", syn.h, "Forecast cycles per origin")->check(CLI::PositiveNumber);
    c_syn->add_option("--scheme", syn.scheme, "seasonal-naive or mean")
        ->check(CLI::IsMember({"seasonal-naive", "mean"}));
    c_syn->add_option("--drift", syn.noise.drift, "Seasonal random walk drift");
    c_syn->add_option("--volatility", syn.noise.volatility, "Seasonal random walk innovation sd");
    c_syn->add_option("--noise", syn.noise.observation_noise, "Observation noise sd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*c_info)
            return run_info(info);
        if (*c_rec)
            return run_reconcile(rec);
        if (*c_heu)
            return run_heuristic(heu);
        if (*c_ev)
            return run_evaluate(ev);
        if (*c_syn)
            return run_synth(syn);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
