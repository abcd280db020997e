#include "psa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psa/maps.hpp"

namespace psa::metrics {
namespace {

// Distances from every surface pixel of `from` to the nearest surface pixel
// of `to`, via an exact Euclidean distance field over `to`'s surface.
// Squared distances are exact integers, so the rounding error is one sqrt.
std::vector<double> directed_surface_distances(const BinaryMask& from, const BinaryMask& to) {
    const BinaryMask sf = surface(from);
    const BinaryMask st = surface(to);
    const std::vector<double> field = maps::squared_distance_to_foreground(st);
    std::vector<double> out;
    out.reserve(sf.count());
    const Grid& g = sf.grid();
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c)
            if (sf.at(r, c)) out.push_back(std::sqrt(field[std::size_t(r) * g.width() + c]));
    return out;
}

void require_nonempty(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (a.count() == 0 || b.count() == 0)
        throw std::invalid_argument(std::string(op) + ": empty mask has no surface");
}

}  // namespace

double dsc(const BinaryMask& a, const BinaryMask& b) {
    if (!a.grid().same_shape(b.grid())) throw std::invalid_argument("dsc: shape mismatch");
    std::size_t inter = 0;
    const Grid& ga = a.grid();
    for (int r = 0; r < ga.height(); ++r)
        for (int c = 0; c < ga.width(); ++c)
            if (a.at(r, c) && b.at(r, c)) ++inter;
    const std::size_t total = a.count() + b.count();
    if (total == 0) return 1.0;
    return 2.0 * double(inter) / double(total);
}

BinaryMask surface(const BinaryMask& m) {
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out(h, w);
    static constexpr int kD[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!m.at(r, c)) continue;
            for (const auto& d : kD) {
                const int rr = r + d[0];
                const int cc = c + d[1];
                if (!m.grid().in_bounds(rr, cc) || !m.at(rr, cc)) {
                    out.at(r, c) = 1.0f;
                    break;
                }
            }
        }
    }
    return BinaryMask(std::move(out));
}

double asd(const BinaryMask& a, const BinaryMask& b) {
    require_nonempty(a, b, "asd");
    const auto d = directed_surface_distances(a, b);
    double sum = 0.0;
    for (double x : d) sum += x;
    return sum / double(d.size());
}

double assd(const BinaryMask& a, const BinaryMask& b) {
    require_nonempty(a, b, "assd");
    const auto dab = directed_surface_distances(a, b);
    const auto dba = directed_surface_distances(b, a);
    // separate partial sums keep the result exactly symmetric in (a, b)
    double sum_ab = 0.0, sum_ba = 0.0;
    for (double x : dab) sum_ab += x;
    for (double x : dba) sum_ba += x;
    return (sum_ab + sum_ba) / double(dab.size() + dba.size());
}

namespace {

double nearest_rank_p95(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t rank = std::size_t(std::ceil(0.95 * double(xs.size())));  // 1-based
    return xs[rank - 1];
}

}  // namespace

double hd95(const BinaryMask& a, const BinaryMask& b) {
    require_nonempty(a, b, "hd95");
    const double ab = nearest_rank_p95(directed_surface_distances(a, b));
    const double ba = nearest_rank_p95(directed_surface_distances(b, a));
    return std::max(ab, ba);
}

double tpr(const BinaryMask& pred, const BinaryMask& ref) {
    if (!pred.grid().same_shape(ref.grid())) throw std::invalid_argument("tpr: shape mismatch");
    if (ref.count() == 0) throw std::invalid_argument("tpr: reference mask is empty");
    std::size_t tp = 0;
    const Grid& g = ref.grid();
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c)
            if (ref.at(r, c) && pred.at(r, c)) ++tp;
    return double(tp) / double(ref.count());
}

double tnr(const BinaryMask& pred, const BinaryMask& ref) {
    if (!pred.grid().same_shape(ref.grid())) throw std::invalid_argument("tnr: shape mismatch");
    const std::size_t total = std::size_t(ref.grid().height()) * ref.grid().width();
    const std::size_t negatives = total - ref.count();
    if (negatives == 0) throw std::invalid_argument("tnr: reference mask has no background");
    std::size_t tn = 0;
    const Grid& g = ref.grid();
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c)
            if (!ref.at(r, c) && !pred.at(r, c)) ++tn;
    return double(tn) / double(negatives);
}

std::pair<double, double> tpr_tnr(const BinaryMask& pred, const BinaryMask& ref) {
    return {tpr(pred, ref), tnr(pred, ref)};
}

SegScores evaluate_pair(const BinaryMask& pred, const BinaryMask& ref) {
    SegScores s;
    s.dsc = dsc(pred, ref);
    s.hd95 = hd95(pred, ref);
    s.asd = asd(pred, ref);
    s.assd = assd(pred, ref);
    s.tpr = tpr(pred, ref);
    s.tnr = tnr(pred, ref);
    return s;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / double(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_stddev: need at least two values");
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / double(xs.size() - 1));
}

}  // namespace psa::metrics
