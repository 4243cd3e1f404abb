#ifndef MLFSM_STATS_TESTS_HPP
#define MLFSM_STATS_TESTS_HPP

#include <vector>

namespace mlfsm {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

double normal_cdf(double x);

// Survival function of the Kolmogorov distribution, Q(x) = 2 sum (-1)^{k-1} e^{-2k^2x^2}.
double kolmogorov_sf(double x);

// One-sample KS against the standard normal.
KsResult ks_test_normal(std::vector<double> samples);

// Two-sample KS with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Anderson-Darling A^2 against the standard normal (fully specified case).
double anderson_darling_normal(std::vector<double> samples);

} // namespace mlfsm

#endif
