#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "psa/metrics.hpp"

namespace psa::report {

/// One evaluated (model, ground-truth style, sample) triple. style 0 means
/// the prediction was scored against the sample's assigned-style contour;
/// style k >= 1 means it was scored against that style's contour.
struct MetricRow {
    std::string model;
    int style = 0;
    std::size_t sample = 0;
    metrics::SegScores scores;
};

/// Flat per-sample evaluation log. Every aggregate in a Table is
/// recomputable from these rows.
struct MetricReport {
    std::vector<MetricRow> rows;
};

/// mean/sd over the finite entries of a metric column. Distance metrics are
/// NaN when either mask is empty, so a cell can aggregate fewer values than
/// the row has samples; all-NaN columns yield NaN cells.
struct Cell {
    double mean = 0.0;
    double sd = 0.0;
};
Cell aggregate(const std::vector<double>& values);

/// One aggregate row of a results table. baseline/delta/p are populated only
/// where a paired comparison against a reference model was run.
struct TableRow {
    std::string model;
    int style = 0;
    int n = 0;  // samples behind the row
    Cell dsc, hd95, asd, assd, tpr, tnr;
    double baseline_dsc = std::numeric_limits<double>::quiet_NaN();
    double delta_dsc = std::numeric_limits<double>::quiet_NaN();
    double p_dsc = std::numeric_limits<double>::quiet_NaN();
};

struct Table {
    std::string name;
    std::vector<TableRow> rows;
};

/// --- CSV serialization ----------------------------------------------------
/// All floating-point fields are written with %.17g, so read_* reproduces the
/// in-memory values bit for bit (NaN round-trips as "nan"). An empty report
/// or table still writes the header line.

void write_metric_csv(const MetricReport& rep, const std::filesystem::path& file);
MetricReport read_metric_csv(const std::filesystem::path& file);

void write_table_csv(const Table& table, const std::filesystem::path& file);
Table read_table_csv(const std::filesystem::path& file);

/// Five-number DSC summary (min, quartiles via linear interpolation, max)
/// per (model, style) group, in first-appearance order of the groups.
void write_boxplot_csv(const MetricReport& rep, const std::filesystem::path& file);

/// Linear-interpolation quantile of a sorted, nonempty vector; q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace psa::report
