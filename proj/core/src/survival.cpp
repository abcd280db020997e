#include "psa/survival.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "psa/stats.hpp"

namespace psa::surv {
namespace {

void check_records(const std::vector<SurvivalRecord>& records, const char* who) {
    if (records.empty()) throw std::invalid_argument(std::string(who) + ": empty records");
    for (const SurvivalRecord& r : records)
        if (!(r.time >= 0.0))
            throw std::invalid_argument(std::string(who) + ": negative or non-finite time");
}

/// Running product of integer ratios, kept exact (gcd-reduced) while it fits
/// in 64 bits. Uncensored curves telescope to survivors/n, so their values
/// come out as a single integer division — identical to the empirical
/// survival fraction.
struct RatioProduct {
    std::int64_t num = 1;
    std::int64_t den = 1;
    double approx = 1.0;
    bool exact = true;

    void multiply(std::int64_t a, std::int64_t b) {  // *= a/b
        if (exact) {
            const std::int64_t g1 = std::gcd(num, b);
            const std::int64_t g2 = std::gcd(a, den);
            const std::int64_t n2 = num / g1, b2 = b / g1;
            const std::int64_t a2 = a / g2, d2 = den / g2;
            constexpr std::int64_t lim = std::numeric_limits<std::int64_t>::max();
            if (a2 != 0 && (n2 > lim / a2 || d2 > lim / b2)) {
                approx = value();
                exact = false;
            } else {
                num = n2 * a2;
                den = d2 * b2;
                return;
            }
        }
        approx *= double(a) / double(b);
    }

    double value() const { return exact ? double(num) / double(den) : approx; }
};

}  // namespace

double KMCurve::survival_at(double t) const {
    double s = 1.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) s = survival[i];
    return s;
}

KMCurve km_estimate(const std::vector<SurvivalRecord>& records) {
    check_records(records, "km_estimate");

    std::vector<const SurvivalRecord*> sorted;
    sorted.reserve(records.size());
    for (const SurvivalRecord& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const SurvivalRecord* x, const SurvivalRecord* y) { return x->time < y->time; });

    KMCurve curve;
    RatioProduct s;
    std::int64_t at_risk = std::int64_t(records.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double t = sorted[i]->time;
        std::int64_t d = 0, removed = 0;
        for (; i < sorted.size() && sorted[i]->time == t; ++i) {
            if (sorted[i]->event) ++d;
            ++removed;
        }
        if (d > 0) {
            curve.times.push_back(t);
            curve.at_risk.push_back(int(at_risk));
            curve.events.push_back(int(d));
            s.multiply(at_risk - d, at_risk);
            curve.survival.push_back(s.value());
        }
        at_risk -= removed;
    }
    return curve;
}

LogrankResult logrank_test(const std::vector<SurvivalRecord>& a,
                           const std::vector<SurvivalRecord>& b) {
    check_records(a, "logrank_test");
    check_records(b, "logrank_test");

    struct Entry {
        double time;
        bool event;
        bool in_a;
    };
    std::vector<Entry> all;
    all.reserve(a.size() + b.size());
    for (const SurvivalRecord& r : a) all.push_back({r.time, r.event, true});
    for (const SurvivalRecord& r : b) all.push_back({r.time, r.event, false});
    std::sort(all.begin(), all.end(),
              [](const Entry& x, const Entry& y) { return x.time < y.time; });

    double observed_a = 0.0, expected_a = 0.0, variance = 0.0;
    std::int64_t total_events = 0;
    std::int64_t na = std::int64_t(a.size()), nb = std::int64_t(b.size());
    std::size_t i = 0;
    while (i < all.size()) {
        const double t = all[i].time;
        std::int64_t d_a = 0, d_b = 0, rem_a = 0, rem_b = 0;
        for (; i < all.size() && all[i].time == t; ++i) {
            if (all[i].in_a) {
                ++rem_a;
                if (all[i].event) ++d_a;
            } else {
                ++rem_b;
                if (all[i].event) ++d_b;
            }
        }
        const std::int64_t d = d_a + d_b;
        if (d > 0) {
            const double n = double(na + nb);
            const double n1 = double(na);
            observed_a += double(d_a);
            expected_a += double(d) * (n1 / n);
            if (na + nb > 1)
                variance += double(d) * (n1 / n) * (1.0 - n1 / n) *
                            (double(na + nb - d) / double(na + nb - 1));
            total_events += d;
        }
        na -= rem_a;
        nb -= rem_b;
    }

    if (total_events == 0)
        throw std::invalid_argument("logrank_test: no events observed in either group");

    LogrankResult r;
    const double diff = observed_a - expected_a;
    if (variance <= 0.0) {
        if (diff == 0.0) {
            r.statistic = 0.0;
            r.p = 1.0;
            return r;
        }
        throw std::runtime_error("logrank_test: degenerate zero-variance statistic");
    }
    r.statistic = diff * diff / variance;
    r.p = stats::chi_square_sf(r.statistic, 1);
    return r;
}

std::vector<SurvivalRecord> simulate_outcomes(const Dataset& ds,
                                              const std::vector<double>& hazard_by_style,
                                              double censor_rate, SeededRng& rng) {
    if (int(hazard_by_style.size()) != ds.num_styles)
        throw std::invalid_argument("simulate_outcomes: one hazard per style required");
    for (double h : hazard_by_style)
        if (!(h > 0.0)) throw std::invalid_argument("simulate_outcomes: hazards must be positive");
    if (!(censor_rate >= 0.0) || censor_rate >= 1.0)
        throw std::invalid_argument("simulate_outcomes: censor_rate must be in [0,1)");

    std::vector<SurvivalRecord> out;
    out.reserve(ds.samples.size());
    for (const StyledSample& s : ds.samples) {
        const double hazard = hazard_by_style[std::size_t(s.assigned_style) - 1];
        // For exponential event/censoring pairs, P(censored) = mu/(lambda+mu);
        // solving for the requested fraction gives the censoring rate.
        const double mu = hazard * censor_rate / (1.0 - censor_rate);
        const double event_time = rng.exponential(hazard);
        const double censor_time =
            mu > 0.0 ? rng.exponential(mu) : std::numeric_limits<double>::infinity();
        SurvivalRecord r;
        r.time = std::min(event_time, censor_time);
        r.event = event_time <= censor_time;
        r.group = s.assigned_style;
        out.push_back(r);
    }
    return out;
}

}  // namespace psa::surv
