#ifndef MLFSM_MCLAB_HPP
#define MLFSM_MCLAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mlfsm/design.hpp"
#include "mlfsm/linalg.hpp"
#include "mlfsm/model.hpp"
#include "mlfsm/solver.hpp"

namespace mlfsm {

// Monte Carlo experiment plan: one model, a grid of observation counts,
// replications per cell, and the moment design supplying the rescaling rule.
struct McPlan {
    ModelParams model;
    std::vector<SamplingScheme> scheme_grid;
    int reps = 200;
    MomentDesign design;
    std::uint64_t base_seed = 1;
    int threads = 1;

    void validate() const;
};

struct McVerdict {
    std::string name;
    std::string tolerance;   // the tolerance the verdict was judged against
    double value = 0.0;
    bool pass = false;
};

// --- variance scaling (first moment bounds) --------------------------------

struct VarianceCell {
    std::size_t n = 0;
    double delta = 0.0;
    double var_s = 0.0;        // empirical Var(S_n(f)), tuple 0
    double gauss_term = 0.0;   // sum_i a_{n,i}^4
    double stable_term = 0.0;  // sum_j b_{n,j}^{beta_j}
    double ratio = 0.0;        // n Var / (gauss + stable)
};

struct VarianceReport {
    std::vector<VarianceCell> cells;
    std::vector<McVerdict> verdicts;
    bool pass = false;
};

VarianceReport mc_variance_scaling(const McPlan& plan, const TestFunction& f);

// One centered replication statistic; exposed so synthetic panels can be fed.
double centered_statistic(const IncrementPanel& panel, const TestFunction& f,
                          const MomentTuple& tuple, double u, double center);

// --- CLT shape checks -------------------------------------------------------

enum class CltCase { I, II, III, IV, V };

struct CltCell {
    std::size_t n = 0;
    double ks_stat = 0.0;
    double ks_p = 0.0;
    double ad_stat = 0.0;
    double cross_corr = 0.0;   // case V only
    bool degenerate = false;
};

struct CltReport {
    std::vector<CltCell> cells;
    std::vector<McVerdict> verdicts;
    std::string regime_note;
    bool pass = false;
};

CltReport mc_clt_check(const McPlan& plan, const TestFunction& f, CltCase c);

// --- asymptotic covariance estimators ----------------------------------------

struct McCovOptions {
    std::size_t path_length = (std::size_t{1} << 16);
    int mesh = 8;
    int k = 2;
    int z_cap = 256;
    double rel_cut = 1e-4;             // lag-sum truncation rule
    std::vector<double> h_seq = {1e-2, 1e-3, 1e-4};
    std::uint64_t seed = 2024;
};

struct CovEstimate {
    Matrix sigma;
    int z_used = 0;
    bool truncation_warning = false;
    double min_eig_before = 0.0;
    std::vector<double> richardson_levels;   // successive extrapolants (Sigma_2 only)
};

// Lag-sum estimate of the adaptive asymptotic covariance from one long
// stationary simulation of the dominant component.
CovEstimate estimate_asymp_cov_G(const ParamVector& theta, const MomentDesign& design,
                                 const McCovOptions& opts);

struct ThresholdCovEstimate {
    CovEstimate sigma1;   // 4x4, exact fBm lag sums
    CovEstimate sigma2;   // 6x6, finite-h Monte Carlo with Richardson extrapolation
};

ThresholdCovEstimate estimate_asymp_cov_threshold(const ParamVector& theta,
                                                  const MomentDesign& design,
                                                  const McCovOptions& opts);

// --- convergence-rate experiments --------------------------------------------

struct RateCell {
    std::size_t n = 0;
    int converged = 0;
    int reps = 0;
    std::vector<double> rmse;   // per coordinate, converged reps only
    bool reliable = true;
};

struct RateParameterFit {
    std::string name;
    double slope = 0.0;
    double slope_se = 0.0;
    double expected = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct RateReport {
    std::vector<RateCell> cells;
    std::vector<RateParameterFit> fits;
    std::vector<std::string> coord_names;
    bool reliable = true;
    bool pass = false;
};

RateReport rate_table_experiment(const McPlan& plan, double slope_slack = 0.25);

// Deterministic replication runner: results land in rep order regardless of
// the worker count.
void parallel_for_reps(int reps, int threads, const std::function<void(int)>& body);

} // namespace mlfsm

#endif
