#include "psa/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace psa::report {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("report: cannot write " + file.string());
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_double(const std::string& s, const std::string& file) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("report: bad number '" + s + "' in " + file);
    return v;
}

long parse_long(const std::string& s, const std::string& file) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("report: bad integer '" + s + "' in " + file);
    return v;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& file,
                                               const std::string& expected_header,
                                               std::size_t columns) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("report: cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != expected_header)
        throw std::runtime_error("report: unexpected header in " + file.string());
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != columns)
            throw std::runtime_error("report: wrong column count in " + file.string());
        rows.push_back(std::move(fields));
    }
    return rows;
}

const char* kMetricHeader = "model,style,sample,dsc,hd95,asd,assd,tpr,tnr";
const char* kTableHeader =
    "model,style,n,dsc_mean,dsc_sd,hd95_mean,hd95_sd,asd_mean,asd_sd,assd_mean,assd_sd,"
    "tpr_mean,tpr_sd,tnr_mean,tnr_sd,baseline_dsc,delta_dsc,p_dsc";
const char* kBoxplotHeader = "model,style,n,min,q1,median,q3,max";

}  // namespace

Cell aggregate(const std::vector<double>& values) {
    double sum = 0.0;
    int n = 0;
    for (double v : values)
        if (std::isfinite(v)) {
            sum += v;
            ++n;
        }
    if (n == 0) return {kNaN, kNaN};
    const double mean = sum / n;
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values)
        if (std::isfinite(v)) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1))};
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
    const double h = q * double(sorted.size() - 1);
    const std::size_t lo = std::size_t(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - double(lo);
    return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

void write_metric_csv(const MetricReport& rep, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << kMetricHeader << '\n';
    for (const auto& r : rep.rows) {
        const auto& s = r.scores;
        out << r.model << ',' << r.style << ',' << r.sample << ',' << fmt17(s.dsc) << ','
            << fmt17(s.hd95) << ',' << fmt17(s.asd) << ',' << fmt17(s.assd) << ','
            << fmt17(s.tpr) << ',' << fmt17(s.tnr) << '\n';
    }
}

MetricReport read_metric_csv(const std::filesystem::path& file) {
    MetricReport rep;
    for (const auto& f : read_csv(file, kMetricHeader, 9)) {
        MetricRow r;
        r.model = f[0];
        r.style = int(parse_long(f[1], file.string()));
        r.sample = std::size_t(parse_long(f[2], file.string()));
        r.scores.dsc = parse_double(f[3], file.string());
        r.scores.hd95 = parse_double(f[4], file.string());
        r.scores.asd = parse_double(f[5], file.string());
        r.scores.assd = parse_double(f[6], file.string());
        r.scores.tpr = parse_double(f[7], file.string());
        r.scores.tnr = parse_double(f[8], file.string());
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

void write_table_csv(const Table& table, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << kTableHeader << '\n';
    for (const auto& r : table.rows) {
        out << r.model << ',' << r.style << ',' << r.n;
        for (const Cell* c : {&r.dsc, &r.hd95, &r.asd, &r.assd, &r.tpr, &r.tnr})
            out << ',' << fmt17(c->mean) << ',' << fmt17(c->sd);
        out << ',' << fmt17(r.baseline_dsc) << ',' << fmt17(r.delta_dsc) << ','
            << fmt17(r.p_dsc) << '\n';
    }
}

Table read_table_csv(const std::filesystem::path& file) {
    Table table;
    table.name = file.stem().string();
    for (const auto& f : read_csv(file, kTableHeader, 18)) {
        TableRow r;
        r.model = f[0];
        r.style = int(parse_long(f[1], file.string()));
        r.n = int(parse_long(f[2], file.string()));
        Cell* cells[] = {&r.dsc, &r.hd95, &r.asd, &r.assd, &r.tpr, &r.tnr};
        for (int i = 0; i < 6; ++i) {
            cells[i]->mean = parse_double(f[3 + 2 * i], file.string());
            cells[i]->sd = parse_double(f[4 + 2 * i], file.string());
        }
        r.baseline_dsc = parse_double(f[15], file.string());
        r.delta_dsc = parse_double(f[16], file.string());
        r.p_dsc = parse_double(f[17], file.string());
        table.rows.push_back(std::move(r));
    }
    return table;
}

void write_boxplot_csv(const MetricReport& rep, const std::filesystem::path& file) {
    std::vector<std::pair<std::string, int>> order;
    std::map<std::pair<std::string, int>, std::vector<double>> groups;
    for (const auto& r : rep.rows) {
        if (!std::isfinite(r.scores.dsc)) continue;
        auto key = std::make_pair(r.model, r.style);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.push_back(r.scores.dsc);
    }
    auto out = open_out(file);
    out << kBoxplotHeader << '\n';
    for (const auto& key : order) {
        auto& v = groups.at(key);
        std::sort(v.begin(), v.end());
        out << key.first << ',' << key.second << ',' << v.size();
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) out << ',' << fmt17(quantile_sorted(v, q));
        out << '\n';
    }
}

}  // namespace psa::report
