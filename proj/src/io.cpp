#include "ctrec/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ctrec::io {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long parse_int(const std::string &s, const std::string &where) {
    errno = 0;
    char *end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || errno != 0 || *end != '\0')
        fail(ErrorKind::FormatError, where + ": expected an integer, got '" + s + "'");
    return v;
}

std::string at_line(const std::string &source, std::size_t line) { return source + ":" + std::to_string(line); }

struct LabelIndex {
    std::unordered_map<std::string, Index> pos;
    explicit LabelIndex(const std::vector<std::string> &labels) {
        for (size_t i = 0; i < labels.size(); ++i)
            pos.emplace(labels[i], static_cast<Index>(i));
    }
    Index operator()(const std::string &s, const std::string &where) const {
        auto it = pos.find(s);
        if (it == pos.end())
            fail(ErrorKind::InvalidEntry, where + ": unknown series '" + s + "'");
        return it->second;
    }
};

int level_of(const TemporalStructure &ts, long k, const std::string &where) {
    for (int level = 0; level < ts.p(); ++level)
        if (ts.factors[static_cast<size_t>(level)] == k)
            return level;
    fail(ErrorKind::NotAFactor, where + ": level_k=" + std::to_string(k) + " is not in the factor set");
}

struct Columns {
    int origin = -1, series, level, index, tau = -1, value;
};

Columns require_columns(const CsvTable &t, const std::string &source, bool with_tau) {
    Columns c;
    auto need = [&](const char *name) {
        const int i = t.column(name);
        if (i < 0)
            fail(ErrorKind::FormatError, source + ": missing column '" + name + "'");
        return i;
    };
    c.origin = t.column("origin");
    c.series = need("series");
    c.level = need("level_k");
    c.index = need("index_within_level");
    if (with_tau)
        c.tau = need("tau");
    c.value = need("value");
    return c;
}

std::string key_text(const std::string &series, long k, long idx) {
    return "(" + series + ", k=" + std::to_string(k) + ", index=" + std::to_string(idx) + ")";
}

} // namespace

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted)
        fail(ErrorKind::FormatError, "unterminated quote");
    out.push_back(trim(cur));
    return out;
}

int CsvTable::column(const std::string &name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream &is, const std::string &source, std::vector<std::string> *comments) {
    CsvTable t;
    std::string line;
    std::size_t no = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++no;
        if (no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0)
            line.erase(0, 3);
        const std::string s = trim(line);
        if (s.empty())
            continue;
        if (s[0] == '#') {
            if (comments)
                comments->push_back(s);
            continue;
        }
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(s);
        } catch (const Error &e) {
            fail(ErrorKind::FormatError, at_line(source, no) + ": unterminated quote");
        }
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            fail(ErrorKind::FormatError, at_line(source, no) + ": expected " + std::to_string(t.header.size()) +
                                             " fields, got " + std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(no);
    }
    if (!have_header)
        fail(ErrorKind::FormatError, source + ": no header row");
    return t;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string &s, const std::string &where) {
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
        fail(ErrorKind::FormatError, where + ": not a number '" + s + "'");
    // underflow to a subnormal is fine; overflow is not
    if (!std::isfinite(v) || (errno == ERANGE && std::abs(v) > 1.0))
        fail(ErrorKind::InvalidEntry, where + ": non-finite value '" + s + "'");
    return v;
}

EdgeListResult edges_to_aggregation(const std::vector<std::tuple<std::string, std::string, double>> &edges) {
    std::vector<std::string> order;
    std::unordered_map<std::string, size_t> id;
    auto intern = [&](const std::string &s) {
        auto [it, fresh] = id.emplace(s, order.size());
        if (fresh)
            order.push_back(s);
        return it->second;
    };
    std::vector<std::vector<std::pair<size_t, double>>> parents;
    std::vector<bool> is_parent;
    for (const auto &[node, parent, w] : edges) {
        const size_t a = intern(node);
        const size_t b = parent.empty() ? a : intern(parent);
        parents.resize(order.size());
        is_parent.resize(order.size(), false);
        if (parent.empty())
            continue;
        if (a == b)
            fail(ErrorKind::InvalidInput, "node '" + node + "' is its own parent");
        parents[a].push_back({b, w});
        is_parent[b] = true;
    }
    std::vector<size_t> uppers, bottoms;
    for (size_t i = 0; i < order.size(); ++i)
        (is_parent[i] ? uppers : bottoms).push_back(i);
    if (bottoms.empty())
        fail(ErrorKind::InvalidInput, "edge list has no leaf nodes");

    // weight[i][u]: total path weight from node i to every ancestor u
    std::vector<std::map<size_t, double>> up(order.size());
    std::vector<int> state(order.size(), 0);
    std::function<void(size_t)> visit = [&](size_t i) {
        if (state[i] == 2)
            return;
        if (state[i] == 1)
            fail(ErrorKind::InvalidInput, "edge list contains a cycle through '" + order[i] + "'");
        state[i] = 1;
        for (const auto &[p, w] : parents[i]) {
            visit(p);
            up[i][p] += w;
            for (const auto &[q, wq] : up[p])
                up[i][q] += w * wq;
        }
        state[i] = 2;
    };
    for (size_t i = 0; i < order.size(); ++i)
        visit(i);

    EdgeListResult r;
    r.agg_matrix = MatrixXd::Zero(static_cast<Index>(uppers.size()), static_cast<Index>(bottoms.size()));
    std::vector<Index> upos(order.size(), -1);
    for (size_t u = 0; u < uppers.size(); ++u)
        upos[uppers[u]] = static_cast<Index>(u);
    for (size_t b = 0; b < bottoms.size(); ++b)
        for (const auto &[u, w] : up[bottoms[b]])
            r.agg_matrix(upos[u], static_cast<Index>(b)) = w;
    for (size_t u : uppers)
        r.labels.push_back(order[u]);
    for (size_t b : bottoms)
        r.labels.push_back(order[b]);
    return r;
}

HierarchySpec parse_hierarchy(std::istream &is, const std::string &source) {
    std::vector<std::string> comments;
    const CsvTable t = read_csv(is, source, &comments);
    HierarchySpec spec;
    bool have_m = false;
    for (const auto &c : comments) {
        const std::string body = trim(c.substr(1));
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            continue;
        const std::string key = trim(body.substr(0, eq)), val = trim(body.substr(eq + 1));
        if (key == "m") {
            spec.m = static_cast<int>(parse_int(val, source + ": m"));
            have_m = true;
        } else if (key == "factors") {
            std::vector<int> f;
            for (const auto &part : split_csv_line(val))
                f.push_back(static_cast<int>(parse_int(part, source + ": factors")));
            spec.factors = f;
        }
    }
    if (!have_m)
        spec.m = 1;

    const bool edge_list = t.header.size() >= 2 && t.header[0] == "node" && t.header[1] == "parent";
    if (edge_list) {
        std::vector<std::tuple<std::string, std::string, double>> edges;
        const int wcol = t.column("weight");
        for (size_t r = 0; r < t.rows.size(); ++r) {
            const auto &row = t.rows[r];
            const std::string where = at_line(source, t.line_numbers[r]);
            if (row[0].empty())
                fail(ErrorKind::FormatError, where + ": empty node name");
            const double w = (wcol >= 0 && !row[static_cast<size_t>(wcol)].empty())
                                 ? parse_number(row[static_cast<size_t>(wcol)], where)
                                 : 1.0;
            edges.emplace_back(row[0], row[1], w);
        }
        EdgeListResult e = edges_to_aggregation(edges);
        spec.cs = build_cross_sectional(e.agg_matrix, e.labels);
        return spec;
    }

    if (t.header.size() < 2)
        fail(ErrorKind::FormatError, source + ": C-matrix header needs at least one bottom label");
    std::vector<std::string> labels;
    MatrixXd C(static_cast<Index>(t.rows.size()), static_cast<Index>(t.header.size() - 1));
    for (size_t r = 0; r < t.rows.size(); ++r) {
        labels.push_back(t.rows[r][0]);
        for (size_t c = 1; c < t.header.size(); ++c)
            C(static_cast<Index>(r), static_cast<Index>(c - 1)) =
                parse_number(t.rows[r][c], at_line(source, t.line_numbers[r]));
    }
    for (size_t c = 1; c < t.header.size(); ++c)
        labels.push_back(t.header[c]);
    std::set<std::string> seen;
    for (const auto &l : labels)
        if (!seen.insert(l).second)
            fail(ErrorKind::InvalidEntry, source + ": duplicate label '" + l + "'");
    spec.cs = build_cross_sectional(C, labels);
    return spec;
}

HierarchySpec read_hierarchy_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        fail(ErrorKind::FormatError, "cannot open '" + path + "'");
    return parse_hierarchy(f, path);
}

void write_hierarchy(std::ostream &os, const HierarchySpec &spec) {
    os << "# m=" << spec.m << '\n';
    if (spec.factors) {
        os << "# factors=";
        for (size_t i = 0; i < spec.factors->size(); ++i)
            os << (i ? "," : "") << (*spec.factors)[i];
        os << '\n';
    }
    const auto &cs = spec.cs;
    os << "node";
    for (Index b = 0; b < cs.n_b; ++b)
        os << ',' << cs.labels[static_cast<size_t>(cs.n_a + b)];
    os << '\n';
    for (Index a = 0; a < cs.n_a; ++a) {
        os << cs.labels[static_cast<size_t>(a)];
        for (Index b = 0; b < cs.n_b; ++b)
            os << ',' << format_number(cs.agg_matrix(a, b));
        os << '\n';
    }
}

void write_forecasts(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts, Index h,
                     const TableauSet &set, bool with_origin) {
    os << (with_origin ? "origin," : "") << "series,level_k,index_within_level,value\n";
    for (const auto &[origin, Y] : set) {
        if (Y.cols() != h * ts.total() || Y.rows() != static_cast<Index>(labels.size()))
            fail(ErrorKind::DimensionMismatch, "tableau does not match labels and horizon");
        for (Index i = 0; i < Y.rows(); ++i)
            for (int level = 0; level < ts.p(); ++level) {
                const int k = ts.factors[static_cast<size_t>(level)];
                const Index first = ts.level_offset(level) * h;
                for (Index j = 0; j < h * ts.M(k); ++j) {
                    if (with_origin)
                        os << origin << ',';
                    os << labels[static_cast<size_t>(i)] << ',' << k << ',' << (j + 1) << ','
                       << format_number(Y(i, first + j)) << '\n';
                }
            }
    }
}

TableauSet read_forecasts(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                          const TemporalStructure &ts, Index *h_out) {
    const CsvTable t = read_csv(is, source);
    const Columns c = require_columns(t, source, false);
    const LabelIndex lab(labels);
    struct Cell {
        Index i;
        int level;
        long idx;
        double v;
    };
    std::map<Index, std::vector<Cell>> by_origin;
    std::vector<long> max_idx(static_cast<size_t>(ts.p()), 0);
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto &row = t.rows[r];
        const std::string where = at_line(source, t.line_numbers[r]);
        const Index origin = c.origin >= 0 ? parse_int(row[static_cast<size_t>(c.origin)], where) : 0;
        const Index i = lab(row[static_cast<size_t>(c.series)], where);
        const long k = parse_int(row[static_cast<size_t>(c.level)], where);
        const int level = level_of(ts, k, where);
        const long idx = parse_int(row[static_cast<size_t>(c.index)], where);
        if (idx < 1)
            fail(ErrorKind::InvalidEntry, where + ": index_within_level must be >= 1");
        by_origin[origin].push_back({i, level, idx, parse_number(row[static_cast<size_t>(c.value)], where)});
        max_idx[static_cast<size_t>(level)] = std::max(max_idx[static_cast<size_t>(level)], idx);
    }
    if (by_origin.empty())
        fail(ErrorKind::FormatError, source + ": no forecast rows");
    Index h = 0;
    for (int level = 0; level < ts.p(); ++level) {
        const long Mk = ts.M(ts.factors[static_cast<size_t>(level)]);
        const long mx = max_idx[static_cast<size_t>(level)];
        if (mx == 0)
            fail(ErrorKind::RaggedEdge, source + ": level k=" + std::to_string(ts.factors[static_cast<size_t>(level)]) +
                                            " is missing");
        if (mx % Mk != 0)
            fail(ErrorKind::RaggedEdge, source + ": level k=" + std::to_string(ts.factors[static_cast<size_t>(level)]) +
                                            " does not cover whole cycles");
        const Index hl = mx / Mk;
        if (h == 0)
            h = hl;
        else if (hl != h)
            fail(ErrorKind::RaggedEdge, source + ": levels cover different numbers of cycles");
    }
    const Index n = static_cast<Index>(labels.size());
    TableauSet out;
    for (const auto &[origin, cells] : by_origin) {
        MatrixXd Y = MatrixXd::Constant(n, h * ts.total(), std::nan(""));
        for (const auto &cell : cells) {
            const Index col = ts.level_offset(cell.level) * h + (cell.idx - 1);
            if (!std::isnan(Y(cell.i, col)))
                fail(ErrorKind::InvalidEntry,
                     source + ": duplicate key " +
                         key_text(labels[static_cast<size_t>(cell.i)], ts.factors[static_cast<size_t>(cell.level)],
                                  cell.idx) +
                         " at origin " + std::to_string(origin));
            Y(cell.i, col) = cell.v;
        }
        for (Index i = 0; i < n; ++i)
            for (int level = 0; level < ts.p(); ++level) {
                const int k = ts.factors[static_cast<size_t>(level)];
                for (Index j = 0; j < h * ts.M(k); ++j)
                    if (std::isnan(Y(i, ts.level_offset(level) * h + j)))
                        fail(ErrorKind::InvalidEntry, source + ": missing key " +
                                                          key_text(labels[static_cast<size_t>(i)], k, j + 1) +
                                                          " at origin " + std::to_string(origin));
            }
        out.emplace(origin, std::move(Y));
    }
    if (h_out)
        *h_out = h;
    return out;
}

void write_residuals(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts,
                     const ResidualSet &set, bool with_origin) {
    os << (with_origin ? "origin," : "") << "series,level_k,index_within_level,tau,value\n";
    const Index n = static_cast<Index>(labels.size());
    for (const auto &[origin, res] : set) {
        const ResidualTableau r = res.ordering == ResidualTableau::Ordering::ByTime ? res : res.to_by_time(ts);
        if (r.n != n)
            fail(ErrorKind::DimensionMismatch, "residuals do not match labels");
        r.validate(ts);
        for (Index tau = 0; tau < r.N(); ++tau)
            for (Index i = 0; i < n; ++i)
                for (int level = 0; level < ts.p(); ++level) {
                    const int k = ts.factors[static_cast<size_t>(level)];
                    for (Index l = 0; l < ts.M(k); ++l) {
                        if (with_origin)
                            os << origin << ',';
                        os << labels[static_cast<size_t>(i)] << ',' << k << ',' << (l + 1) << ',' << (tau + 1) << ','
                           << format_number(r.E((ts.level_offset(level) + l) * n + i, tau)) << '\n';
                    }
                }
    }
}

ResidualSet read_residuals(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                           const TemporalStructure &ts) {
    const CsvTable t = read_csv(is, source);
    const Columns c = require_columns(t, source, true);
    const LabelIndex lab(labels);
    const Index n = static_cast<Index>(labels.size());
    struct Cell {
        Index row;
        long tau;
        double v;
    };
    std::map<Index, std::vector<Cell>> by_origin;
    std::map<Index, long> max_tau;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto &row = t.rows[r];
        const std::string where = at_line(source, t.line_numbers[r]);
        const Index origin = c.origin >= 0 ? parse_int(row[static_cast<size_t>(c.origin)], where) : 0;
        const Index i = lab(row[static_cast<size_t>(c.series)], where);
        const long k = parse_int(row[static_cast<size_t>(c.level)], where);
        const int level = level_of(ts, k, where);
        const long l = parse_int(row[static_cast<size_t>(c.index)], where);
        if (l < 1 || l > ts.M(static_cast<int>(k)))
            fail(ErrorKind::InvalidEntry, where + ": index_within_level out of range for k=" + std::to_string(k));
        const long tau = parse_int(row[static_cast<size_t>(c.tau)], where);
        if (tau < 1)
            fail(ErrorKind::InvalidEntry, where + ": tau must be >= 1");
        by_origin[origin].push_back(
            {(ts.level_offset(level) + l - 1) * n + i, tau, parse_number(row[static_cast<size_t>(c.value)], where)});
        max_tau[origin] = std::max(max_tau[origin], tau);
    }
    ResidualSet out;
    for (const auto &[origin, cells] : by_origin) {
        ResidualTableau r;
        r.n = n;
        r.E = MatrixXd::Constant(n * ts.total(), max_tau[origin], std::nan(""));
        for (const auto &cell : cells) {
            double &slot = r.E(cell.row, cell.tau - 1);
            if (!std::isnan(slot))
                fail(ErrorKind::InvalidEntry, source + ": duplicate residual key at origin " + std::to_string(origin));
            slot = cell.v;
        }
        if (r.E.hasNaN())
            fail(ErrorKind::RaggedEdge, source + ": residuals at origin " + std::to_string(origin) +
                                            " do not cover every series, level and tau");
        out.emplace(origin, std::move(r));
    }
    return out;
}

void write_actuals(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts,
                   const std::vector<MatrixXd> &cycles) {
    os << "series,level_k,index_within_level,value\n";
    for (size_t i = 0; i < labels.size(); ++i)
        for (int level = 0; level < ts.p(); ++level) {
            const int k = ts.factors[static_cast<size_t>(level)];
            const Index Mk = ts.M(k);
            for (size_t c = 0; c < cycles.size(); ++c)
                for (Index l = 0; l < Mk; ++l)
                    os << labels[i] << ',' << k << ',' << (static_cast<Index>(c) * Mk + l + 1) << ','
                       << format_number(cycles[c](static_cast<Index>(i), ts.level_offset(level) + l)) << '\n';
        }
}

std::vector<MatrixXd> read_actuals(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                                   const TemporalStructure &ts) {
    Index cycles = 0;
    TableauSet set = read_forecasts(is, source, labels, ts, &cycles);
    if (set.size() != 1)
        fail(ErrorKind::FormatError, source + ": actuals must not carry several origins");
    const MatrixXd &Y = set.begin()->second;
    const auto map = cycle_column_map(ts, cycles);
    const Index T = ts.total();
    std::vector<MatrixXd> out(static_cast<size_t>(cycles), MatrixXd(Y.rows(), T));
    for (Index c = 0; c < cycles; ++c)
        for (Index r = 0; r < T; ++r)
            out[static_cast<size_t>(c)].col(r) = Y.col(map[static_cast<size_t>(c * T + r)]);
    return out;
}

} // namespace ctrec::io
