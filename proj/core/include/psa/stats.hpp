#pragma once

#include <vector>

namespace psa::stats {

double mean(const std::vector<double>& v);
/// Sample standard deviation (n-1 denominator); 0 for n < 2.
double sample_sd(const std::vector<double>& v);

/// Regularized lower incomplete gamma P(a,x), series/continued-fraction
/// evaluation accurate to ~1e-12. a > 0, x >= 0.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);

/// Regularized incomplete beta I_x(a,b) via the Lentz continued fraction.
double regularized_beta(double a, double b, double x);

struct TTestResult {
    double statistic = 0.0;
    double p = 1.0;      // two-tailed
    int dof = 0;
    double mean_diff = 0.0;
};

/// Paired two-tailed t-test on equal-length samples. Throws
/// std::invalid_argument for n < 2 or length mismatch. Zero-variance
/// differences give p = 1 when the mean difference is 0, else p = 0.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Kolmogorov-Smirnov sup-distance between the sample and U(0,1).
double ks_uniform_distance(std::vector<double> values);

}  // namespace psa::stats
