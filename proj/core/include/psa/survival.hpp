#pragma once

#include <vector>

#include "psa/dataset.hpp"
#include "psa/rng.hpp"

namespace psa::surv {

struct SurvivalRecord {
    double time = 0.0;  // time-to-event or censoring, >= 0
    bool event = false; // true = event observed, false = censored
    int group = 0;      // categorical label (style id downstream)
};

/// Product-limit estimate. `times` holds the distinct observed event times
/// ascending; `survival[i]` is S(t) just after times[i]. S is 1 before the
/// first event and constant between event times.
struct KMCurve {
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<int> at_risk;  // n_i at each event time
    std::vector<int> events;   // d_i at each event time

    double survival_at(double t) const;
};

/// Throws std::invalid_argument on empty input or negative times. Subjects
/// censored at an event time count as still at risk there (events precede
/// censorings at ties).
KMCurve km_estimate(const std::vector<SurvivalRecord>& records);

struct LogrankResult {
    double statistic = 0.0;  // chi-square, 1 dof
    double p = 1.0;
};

/// Two-group log rank test. Group labels inside the records are ignored;
/// membership is by argument. Throws std::invalid_argument when either side
/// is empty or no events were observed at all, std::runtime_error when the
/// statistic's variance degenerates to zero with events present.
LogrankResult logrank_test(const std::vector<SurvivalRecord>& a,
                           const std::vector<SurvivalRecord>& b);

/// Exponential event time per sample with its style's hazard, plus an
/// independent exponential censoring time tuned so that roughly
/// `censor_rate` of subjects are censored. group = assigned style.
/// hazards are per style (index style-1), all > 0; censor_rate in [0,1).
std::vector<SurvivalRecord> simulate_outcomes(const Dataset& ds,
                                              const std::vector<double>& hazard_by_style,
                                              double censor_rate, SeededRng& rng);

}  // namespace psa::surv
