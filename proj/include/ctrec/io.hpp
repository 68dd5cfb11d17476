#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "ctrec/covariance.hpp"
#include "ctrec/errors.hpp"
#include "ctrec/hierarchy.hpp"
#include "ctrec/temporal.hpp"

namespace ctrec::io {

std::vector<std::string> split_csv_line(const std::string &line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    // Column position by name, or -1.
    int column(const std::string &name) const;
};

// Blank lines and lines starting with '#' are skipped; `comments` collects the latter.
CsvTable read_csv(std::istream &is, const std::string &source, std::vector<std::string> *comments = nullptr);

// 17 significant digits, so strtod gives back the same double.
std::string format_number(double v);
double parse_number(const std::string &s, const std::string &where);

struct HierarchySpec {
    CrossSectionalStructure cs;
    int m = 1;
    std::optional<std::vector<int>> factors;

    TemporalStructure temporal() const { return build_temporal(m, factors); }
};

// C-matrix form (header of bottom labels, first column of upper labels) or edge list
// (node,parent,weight). `# m=<int>` and `# factors=<k1,k2,..>` comment lines carry the temporal part.
HierarchySpec parse_hierarchy(std::istream &is, const std::string &source);
HierarchySpec read_hierarchy_file(const std::string &path);
void write_hierarchy(std::ostream &os, const HierarchySpec &spec);

// Edge list to an aggregation matrix; weights multiply along paths and sum over multiple parents.
struct EdgeListResult {
    MatrixXd agg_matrix;
    std::vector<std::string> labels; // uppers then bottoms
};
EdgeListResult edges_to_aggregation(const std::vector<std::tuple<std::string, std::string, double>> &edges);

// Forecast tableaux keyed by origin; a file without an origin column gives origin 0.
using TableauSet = std::map<Index, MatrixXd>;

void write_forecasts(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts, Index h,
                     const TableauSet &set, bool with_origin);
// Horizon (cycles) is deduced from the indices and has to agree across levels and origins.
TableauSet read_forecasts(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                          const TemporalStructure &ts, Index *h_out = nullptr);

using ResidualSet = std::map<Index, ResidualTableau>;

void write_residuals(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts,
                     const ResidualSet &set, bool with_origin);
ResidualSet read_residuals(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                           const TemporalStructure &ts);

// Actuals use a global index within each level: 1 .. cycles * M_k.
void write_actuals(std::ostream &os, const std::vector<std::string> &labels, const TemporalStructure &ts,
                   const std::vector<MatrixXd> &cycles);
std::vector<MatrixXd> read_actuals(std::istream &is, const std::string &source, const std::vector<std::string> &labels,
                                   const TemporalStructure &ts);

} // namespace ctrec::io
