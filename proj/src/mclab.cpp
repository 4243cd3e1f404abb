#include "mlfsm/mclab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mlfsm/errors.hpp"
#include "mlfsm/kernel.hpp"
#include "mlfsm/numeric.hpp"
#include "mlfsm/simulate.hpp"
#include "mlfsm/stats_tests.hpp"

namespace mlfsm {

namespace {

// Scaling sequences a_{n,i} = u_n delta^{H_i} (Gaussian components) and
// b_{n,j} = u_n delta^{H_j} (stable components) of the standardized array.
struct ScalingTerms {
    double gauss_sq = 0.0;     // sum a^2
    double gauss_4 = 0.0;      // sum a^4
    double stable_beta = 0.0;  // sum b^{beta}
};

ScalingTerms scaling_terms(const ModelParams& model, double delta, double u) {
    ScalingTerms t;
    for (const auto& c : model.components) {
        const double s = u * std::pow(delta, c.H);
        if (c.beta == 2.0) {
            t.gauss_sq += s * s;
            t.gauss_4 += s * s * s * s;
        } else {
            t.stable_beta += std::pow(s, c.beta);
        }
    }
    return t;
}

std::vector<int> design_gammas(const MomentDesign& design) {
    std::vector<int> g;
    for (const auto& t : design.tuples)
        if (std::find(g.begin(), g.end(), t.gamma) == g.end()) g.push_back(t.gamma);
    std::sort(g.begin(), g.end());
    return g;
}

double slope_fit(const std::vector<double>& logx, const std::vector<double>& logy,
                 double* se_out) {
    const std::size_t m = logx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = logy[i] - intercept - slope * logx[i];
        ss += r * r;
    }
    if (se_out) {
        *se_out = (m > 2) ? std::sqrt(ss / static_cast<double>(m - 2) * m / denom)
                          : 0.0;
    }
    return slope;
}

} // namespace

void McPlan::validate() const {
    model.validate();
    design.validate();
    if (scheme_grid.empty()) throw config_error("McPlan: empty scheme grid");
    if (reps < 2) throw config_error("McPlan: reps must be >= 2");
    if (reps < 50) throw config_error("McPlan: at least 50 reps required for p-values");
    for (const auto& s : scheme_grid) s.validate();
}

void parallel_for_reps(int reps, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) body(r);
        });
    for (auto& th : pool) th.join();
}

double centered_statistic(const IncrementPanel& panel, const TestFunction& f,
                          const MomentTuple& tuple, double u, double center) {
    const auto& col = panel.column_for(tuple.gamma);
    const double scale = u * tuple.lambda;
    return pairwise_mean(col, [&](double x) { return eval_test_function(f, scale * x); }) -
           center;
}

VarianceReport mc_variance_scaling(const McPlan& plan, const TestFunction& f) {
    plan.validate();
    const auto gammas = design_gammas(plan.design);
    VarianceReport report;

    std::uint64_t cell_offset = 0;
    for (const auto& scheme : plan.scheme_grid) {
        const double delta = scheme.delta;
        const ParamVector theta0 = ParamVector::adaptive_from_model(plan.model, scheme.k);
        const double u = plan.design.w_factor(delta) * std::pow(delta, -theta0.h_ref());
        const auto& tuple = plan.design.tuples[0];
        const double center =
            model_expectation(f, theta0, std::abs(tuple.lambda), tuple.gamma, delta, u);

        std::vector<double> stats(plan.reps);
        parallel_for_reps(plan.reps, plan.threads, [&](int r) {
            SamplingScheme s = scheme;
            s.max_gamma = std::max(s.max_gamma, plan.design.max_gamma());
            const auto path = simulate_mixed_path(
                plan.model, s, plan.base_seed, cell_offset + 16 * (r + 1));
            const auto panel = k_order_increments(path, s.k, gammas);
            stats[r] = centered_statistic(panel, f, tuple, u, center);
        });

        VarianceCell cell;
        cell.n = scheme.n;
        cell.delta = delta;
        cell.var_s = sample_variance(stats);
        const auto terms = scaling_terms(plan.model, delta, u);
        cell.gauss_term = terms.gauss_4;
        cell.stable_term = terms.stable_beta;
        const double denom = terms.gauss_4 + terms.stable_beta;
        cell.ratio = denom > 0.0 ? static_cast<double>(scheme.n) * cell.var_s / denom : 0.0;
        report.cells.push_back(cell);
        cell_offset += static_cast<std::uint64_t>(plan.reps) * 16 + 64;
    }

    // The bound says n Var / (sum a^4 + sum b^beta) stays under a constant
    // fitted at the smallest n; the realized ratios may vary by at most 3x
    // across the grid.
    McVerdict v;
    v.name = "variance-ratio-bounded";
    v.tolerance = "max ratio <= 3 x min ratio across the n grid";
    double lo = report.cells.front().ratio, hi = lo;
    for (const auto& c : report.cells) {
        lo = std::min(lo, c.ratio);
        hi = std::max(hi, c.ratio);
    }
    v.value = lo > 0.0 ? hi / lo : 0.0;
    v.pass = lo > 0.0 && hi <= 3.0 * lo;
    report.verdicts.push_back(v);
    report.pass = v.pass;
    return report;
}

namespace {

void validate_regime(const McPlan& plan, CltCase c, const TestFunction& f) {
    const auto& last = plan.scheme_grid.back();
    const auto& first = plan.scheme_grid.front();
    const ParamVector th_last = ParamVector::adaptive_from_model(plan.model, last.k);
    const double u_last =
        plan.design.w_factor(last.delta) * std::pow(last.delta, -th_last.h_ref());
    const double u_first =
        plan.design.w_factor(first.delta) * std::pow(first.delta, -th_last.h_ref());
    const auto t_last = scaling_terms(plan.model, last.delta, u_last);
    const auto t_first = scaling_terms(plan.model, first.delta, u_first);
    const double n_last = static_cast<double>(last.n);

    auto fail = [](const std::string& what) {
        throw config_error("mc_clt_check: regime validation failed: " + what);
    };

    switch (c) {
        case CltCase::I:
            if (t_last.gauss_4 < 0.25) fail("a_n does not stay bounded away from 0 (need a > 0)");
            if (t_last.stable_beta > 0.05 * t_last.gauss_4)
                fail("stable scaling b_n^beta is not negligible (need b = 0)");
            break;
        case CltCase::II:
            if (t_last.stable_beta < 0.25) fail("b_n^beta does not stay bounded away from 0 (need b > 0)");
            if (t_last.gauss_4 > 0.05 * t_last.stable_beta)
                fail("Gaussian scaling a_n is not negligible (need a = 0)");
            break;
        case CltCase::III:
            if (t_last.stable_beta > 0.25) fail("b_n must vanish (b = 0)");
            if (t_last.gauss_4 > 0.2 * t_last.stable_beta)
                fail("a_n^4 << b_n^beta violated at the largest n");
            if (n_last * t_last.stable_beta < 10.0) fail("n b_n^beta -> infinity violated");
            break;
        case CltCase::IV:
            if (t_last.gauss_4 > 0.25) fail("a_n must vanish (a = 0)");
            if (t_last.stable_beta > 0.2 * t_last.gauss_4)
                fail("b_n^beta << a_n^4 violated at the largest n");
            if (n_last * t_last.gauss_4 < 10.0) fail("n a_n^4 -> infinity violated");
            if (f.kind != TestFunctionKind::GaussBump)
                fail("case (iv) needs D^2 f(0) != 0 (gauss-bump test function)");
            break;
        case CltCase::V: {
            if (n_last * t_last.gauss_4 < 10.0) fail("n a_n^4 -> infinity violated");
            if (n_last * t_last.stable_beta < 10.0) fail("n b_n^beta -> infinity violated");
            const double eta = plan.design.f2.eta;
            const double lam = 0.5;
            const double expo = std::exp(-eta * eta * lam * lam /
                                         (2.0 * plan.design.w_sigma * plan.design.w_sigma *
                                          t_last.gauss_sq));
            if (!(expo < 0.2 * t_last.stable_beta))
                fail("exp(-eta^2 lambda^2 / (2 d sigma^2 sum a^2)) << b_n^beta violated");
            if (!(t_last.stable_beta < 0.2 * t_last.gauss_4))
                fail("b_n^beta << a_n^4 violated");
            (void)t_first;
            break;
        }
    }
}

} // namespace

CltReport mc_clt_check(const McPlan& plan, const TestFunction& f, CltCase c) {
    plan.validate();
    validate_regime(plan, c, f);
    const auto gammas = design_gammas(plan.design);
    CltReport report;

    std::uint64_t cell_offset = 0;
    for (const auto& scheme : plan.scheme_grid) {
        const double delta = scheme.delta;
        const ParamVector theta0 = ParamVector::adaptive_from_model(plan.model, scheme.k);
        const double u = plan.design.w_factor(delta) * std::pow(delta, -theta0.h_ref());
        const auto& tuple = plan.design.tuples[0];
        const double center =
            model_expectation(f, theta0, std::abs(tuple.lambda), tuple.gamma, delta, u);

        // Case V pairs the gauss-bump statistic with the smooth threshold.
        const bool joint = (c == CltCase::V);
        const TestFunction f_second = plan.design.f2;
        double center2 = 0.0;
        if (joint)
            center2 = model_expectation(f_second, theta0, std::abs(tuple.lambda),
                                        tuple.gamma, delta, u);

        std::vector<double> s1(plan.reps), s2(plan.reps, 0.0);
        parallel_for_reps(plan.reps, plan.threads, [&](int r) {
            SamplingScheme s = scheme;
            s.max_gamma = std::max(s.max_gamma, plan.design.max_gamma());
            const auto path = simulate_mixed_path(
                plan.model, s, plan.base_seed, cell_offset + 16 * (r + 1));
            const auto panel = k_order_increments(path, s.k, gammas);
            s1[r] = centered_statistic(panel, f, tuple, u, center);
            if (joint) s2[r] = centered_statistic(panel, f_second, tuple, u, center2);
        });

        CltCell cell;
        cell.n = scheme.n;
        const double m1 = pairwise_mean(s1);
        const double sd1 = std::sqrt(sample_variance(s1));
        if (sd1 == 0.0) {
            cell.degenerate = true;
            report.cells.push_back(cell);
            cell_offset += static_cast<std::uint64_t>(plan.reps) * 16 + 64;
            continue;
        }
        std::vector<double> z(plan.reps);
        for (int r = 0; r < plan.reps; ++r) z[r] = (s1[r] - m1) / sd1;
        const auto ks = ks_test_normal(z);
        cell.ks_stat = ks.statistic;
        cell.ks_p = ks.p_value;
        cell.ad_stat = anderson_darling_normal(z);
        if (joint) {
            const double m2 = pairwise_mean(s2);
            const double sd2 = std::sqrt(sample_variance(s2));
            if (sd2 > 0.0) {
                double acc = 0.0;
                for (int r = 0; r < plan.reps; ++r)
                    acc += (s1[r] - m1) * (s2[r] - m2);
                cell.cross_corr = acc / (static_cast<double>(plan.reps - 1) * sd1 * sd2);
            }
        }
        report.cells.push_back(cell);
        cell_offset += static_cast<std::uint64_t>(plan.reps) * 16 + 64;
    }

    const auto& last = report.cells.back();
    McVerdict v;
    v.name = "ks-normality";
    v.tolerance = "p > 0.01 at the largest n";
    if (last.degenerate) {
        v.name = "degenerate";
        v.tolerance = "all replication statistics identically zero; test skipped";
        v.value = 0.0;
        v.pass = true;
        report.regime_note = "degenerate";
    } else {
        v.value = last.ks_p;
        v.pass = last.ks_p > 0.01;
    }
    report.verdicts.push_back(v);
    if (c == CltCase::V && !last.degenerate) {
        McVerdict vc;
        vc.name = "cross-correlation-vanishes";
        vc.tolerance = "|corr| < 4 / sqrt(reps)";
        vc.value = last.cross_corr;
        vc.pass = std::abs(last.cross_corr) < 4.0 / std::sqrt(static_cast<double>(plan.reps));
        report.verdicts.push_back(vc);
    }
    report.pass = true;
    for (const auto& vv : report.verdicts) report.pass = report.pass && vv.pass;
    return report;
}

namespace {

// Long stationary sample of k-th order increments of one component at unit
// frequency, one column per lag.
IncrementPanel unit_frequency_panel(const Component& comp, const std::vector<int>& gammas,
                                    const McCovOptions& opts) {
    ModelParams m;
    m.components = {comp};
    SamplingScheme s;
    s.n = opts.path_length;
    s.delta = 1.0;
    s.k = opts.k;
    s.mesh = opts.mesh;
    s.max_gamma = *std::max_element(gammas.begin(), gammas.end());
    s.truncation = 200.0 * opts.k * s.max_gamma;
    const auto path = simulate_mixed_path(m, s, opts.seed, 1);
    return k_order_increments(path, opts.k, gammas);
}

// Natural scale of the dominant component recovered from its transformed scale.
double natural_scale(const MomentComponent& c, int k) {
    return std::pow(c.s / kernel_norm(c.h, c.beta, k), 1.0 / c.beta);
}

} // namespace

CovEstimate estimate_asymp_cov_G(const ParamVector& theta, const MomentDesign& design,
                                 const McCovOptions& opts) {
    const auto comps = theta.components();
    const auto& dom = comps[0];
    const double b1 = natural_scale(dom, opts.k);

    std::vector<int> gammas = design_gammas(design);
    Component comp{b1, dom.h, dom.beta};
    const auto panel = unit_frequency_panel(comp, gammas, opts);

    // f-transforms per tuple, aligned on the common index range.
    const std::size_t d = design.dim();
    std::size_t max_first = 0;
    for (int g : gammas)
        max_first = std::max(max_first, static_cast<std::size_t>(opts.k * g));
    const std::size_t len = opts.path_length - max_first;

    std::vector<std::vector<double>> a(d, std::vector<double>(len));
    for (std::size_t r = 0; r < d; ++r) {
        const auto& t = design.tuples[r];
        const auto& col = panel.column_for(t.gamma);
        const std::size_t off = max_first - static_cast<std::size_t>(opts.k * t.gamma);
        const auto& f = design.function_for(r);
        double mean = 0.0;
        for (std::size_t l = 0; l < len; ++l) {
            a[r][l] = eval_test_function(f, t.lambda * col[off + l]);
            mean += a[r][l];
        }
        mean /= static_cast<double>(len);
        for (std::size_t l = 0; l < len; ++l) a[r][l] -= mean;
    }

    auto cross_cov = [&](std::size_t r, std::size_t rp, long z) {
        // E[A_r[l+z] A_rp[l]] over the overlap
        const long lz = std::labs(z);
        double acc = 0.0;
        const std::size_t m = len - static_cast<std::size_t>(lz);
        if (z >= 0)
            for (std::size_t l = 0; l < m; ++l) acc += a[r][l + lz] * a[rp][l];
        else
            for (std::size_t l = 0; l < m; ++l) acc += a[r][l] * a[rp][l + lz];
        return acc / static_cast<double>(m);
    };

    CovEstimate out;
    Matrix sigma(d, d);
    double lag0_max = 0.0;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t rp = 0; rp < d; ++rp) {
            const double c0 = cross_cov(r, rp, 0);
            sigma(r, rp) = c0;
            lag0_max = std::max(lag0_max, std::abs(c0));
        }

    // Stop once terms fall below the truncation rule or the sampling noise
    // floor of the cross-covariance estimates, whichever is larger; the sum
    // is then cap-independent.
    const double stop_level =
        lag0_max * std::max(opts.rel_cut, 4.0 / std::sqrt(static_cast<double>(len)));
    int quiet = 0;
    int z = 1;
    for (; z <= opts.z_cap; ++z) {
        double mag = 0.0;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t rp = 0; rp < d; ++rp) {
                const double cp = cross_cov(r, rp, z);
                const double cm = cross_cov(r, rp, -z);
                sigma(r, rp) += cp + cm;
                mag = std::max(mag, std::max(std::abs(cp), std::abs(cm)));
            }
        quiet = (mag < stop_level) ? quiet + 1 : 0;
        if (quiet >= 5) break;
    }
    out.z_used = std::min(z, opts.z_cap);
    out.truncation_warning = (quiet < 5);

    auto eig = symmetric_eigen(sigma);
    out.min_eig_before = eig.values.front();
    out.sigma = project_psd(sigma);
    return out;
}

ThresholdCovEstimate estimate_asymp_cov_threshold(const ParamVector& theta,
                                                  const MomentDesign& design,
                                                  const McCovOptions& opts) {
    if (theta.domain != ParamDomain::Threshold || design.domain != ParamDomain::Threshold)
        throw input_error("estimate_asymp_cov_threshold: threshold domain required");
    const auto comps = theta.components();
    ThresholdCovEstimate out;

    // Sigma_1: exact fBm lag sums for the dominant Gaussian component.
    {
        const auto& g1 = comps[0];
        const double a1 = natural_scale(g1, opts.k);
        const double f1dd = -design.f1.decay;
        Matrix sigma(4, 4);
        int zmax_used = 0;
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t rp = 0; rp < 4; ++rp) {
                const auto& tr = design.tuples[r];
                const auto& ts = design.tuples[rp];
                const double pref = tr.lambda * tr.lambda * ts.lambda * ts.lambda / 4.0 *
                                    f1dd * f1dd * std::pow(a1, 4.0);
                double sum = 0.0;
                const double c0 =
                    std::pow(fbm_kdiff_cov(g1.h, opts.k, tr.gamma, ts.gamma, 0), 2.0);
                sum += c0;
                for (int z = 1; z <= opts.z_cap; ++z) {
                    const double cp =
                        std::pow(fbm_kdiff_cov(g1.h, opts.k, tr.gamma, ts.gamma, z), 2.0);
                    const double cm =
                        std::pow(fbm_kdiff_cov(g1.h, opts.k, tr.gamma, ts.gamma, -z), 2.0);
                    sum += cp + cm;
                    zmax_used = std::max(zmax_used, z);
                    if (cp + cm < 1e-10 * std::max(c0, 1e-300)) break;
                }
                sigma(r, rp) = pref * sum;
            }
        auto eig = symmetric_eigen(sigma);
        out.sigma1.min_eig_before = eig.values.front();
        out.sigma1.sigma = project_psd(sigma);
        out.sigma1.z_used = zmax_used;
    }

    // Sigma_2: finite-h quotients of the smooth-threshold moments for the
    // dominant stable component, Richardson-extrapolated over the h schedule.
    {
        const auto& s1 = comps[2];
        const double b1 = natural_scale(s1, opts.k);
        std::vector<int> gammas;
        for (std::size_t r = 4; r < 10; ++r) {
            const int g = design.tuples[r].gamma;
            if (std::find(gammas.begin(), gammas.end(), g) == gammas.end())
                gammas.push_back(g);
        }
        std::sort(gammas.begin(), gammas.end());
        Component comp{b1, s1.h, s1.beta};
        const auto panel = unit_frequency_panel(comp, gammas, opts);

        std::size_t max_first = 0;
        for (int g : gammas)
            max_first = std::max(max_first, static_cast<std::size_t>(opts.k * g));
        const std::size_t len = opts.path_length - max_first;

        // Raw columns aligned to a common index origin.
        std::vector<const std::vector<double>*> cols(10, nullptr);
        std::vector<std::size_t> offs(10, 0);
        for (std::size_t r = 4; r < 10; ++r) {
            cols[r] = &panel.column_for(design.tuples[r].gamma);
            offs[r] = max_first - static_cast<std::size_t>(opts.k * design.tuples[r].gamma);
        }

        const std::size_t nh = opts.h_seq.size();
        std::vector<Matrix> level(nh, Matrix(6, 6));
        int z_used = 0;
        bool warn = false;

        for (std::size_t hi = 0; hi < nh; ++hi) {
            const double h = opts.h_seq[hi];
            const double hpow = std::pow(h, 1.0 / s1.beta);
            // f2-transforms at threshold scale h^{1/beta}
            std::vector<std::vector<double>> a(10);
            for (std::size_t r = 4; r < 10; ++r) {
                a[r].resize(len);
                const double lam = design.tuples[r].lambda * hpow;
                for (std::size_t l = 0; l < len; ++l)
                    a[r][l] = eval_test_function(design.f2, lam * (*cols[r])[offs[r] + l]);
            }
            Matrix sig(6, 6);
            auto cross = [&](std::size_t r, std::size_t rp, long z) {
                const long lz = std::labs(z);
                const std::size_t m = len - static_cast<std::size_t>(lz);
                double acc = 0.0;
                if (z >= 0)
                    for (std::size_t l = 0; l < m; ++l) acc += a[r][l + lz] * a[rp][l];
                else
                    for (std::size_t l = 0; l < m; ++l) acc += a[r][l] * a[rp][l - z];
                return acc / static_cast<double>(m);
            };
            double lag0 = 0.0;
            for (std::size_t r = 4; r < 10; ++r)
                for (std::size_t rp = 4; rp < 10; ++rp) {
                    const double c0 = cross(r, rp, 0);
                    sig(r - 4, rp - 4) = c0;
                    lag0 = std::max(lag0, std::abs(c0));
                }
            const double stop2 =
                std::max(lag0, 1e-300) *
                std::max(opts.rel_cut, 4.0 / std::sqrt(static_cast<double>(len)));
            int quiet = 0;
            int z = 1;
            for (; z <= opts.z_cap; ++z) {
                double mag = 0.0;
                for (std::size_t r = 4; r < 10; ++r)
                    for (std::size_t rp = 4; rp < 10; ++rp) {
                        const double cp = cross(r, rp, z);
                        const double cm = cross(r, rp, -z);
                        sig(r - 4, rp - 4) += cp + cm;
                        mag = std::max(mag, std::max(std::abs(cp), std::abs(cm)));
                    }
                quiet = (mag < stop2) ? quiet + 1 : 0;
                if (quiet >= 5) break;
            }
            warn = warn || (quiet < 5);
            z_used = std::max(z_used, std::min(z, opts.z_cap));
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j) level[hi](i, j) = sig(i, j) / h;
        }

        // Aitken extrapolation across the geometric h schedule; fall back to
        // the smallest-h level when the pattern degenerates.
        Matrix extrap = level.back();
        if (nh >= 3) {
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j) {
                    const double q0 = level[nh - 3](i, j);
                    const double q1 = level[nh - 2](i, j);
                    const double q2 = level[nh - 1](i, j);
                    const double denom = (q1 - q0) - (q2 - q1);
                    if (std::abs(denom) > 1e-14 * std::max(1.0, std::abs(q2)))
                        extrap(i, j) = q2 + (q2 - q1) * (q2 - q1) / denom;
                }
        }
        for (std::size_t hi = 0; hi < nh; ++hi)
            out.sigma2.richardson_levels.push_back(level[hi](0, 0));

        auto eig = symmetric_eigen(extrap);
        out.sigma2.min_eig_before = eig.values.front();
        out.sigma2.sigma = project_psd(extrap);
        out.sigma2.z_used = z_used;
        out.sigma2.truncation_warning = warn;
    }
    return out;
}

RateReport rate_table_experiment(const McPlan& plan, double slope_slack) {
    plan.validate();
    const auto gammas = design_gammas(plan.design);
    RateReport report;

    const int k = plan.scheme_grid.front().k;
    ParamVector theta0 = (plan.design.domain == ParamDomain::Adaptive)
                             ? ParamVector::adaptive_from_model(plan.model, k)
                             : ParamVector();
    if (plan.design.domain == ParamDomain::Threshold) {
        if (plan.model.q() != 4 || plan.model.components[0].beta != 2.0 ||
            plan.model.components[1].beta != 2.0)
            throw config_error(
                "rate_table_experiment: the threshold method needs two Gaussian "
                "components followed by two stable components");
        const auto bt = btilde_from_b(plan.model, k);
        const auto& mc = plan.model.components;
        theta0 = ParamVector::threshold(bt[0], mc[0].H, bt[1], mc[1].H, bt[2], mc[2].H,
                                        mc[2].beta, bt[3], mc[3].H, mc[3].beta);
    }

    // Infeasible plans are refused before any simulation.
    const double rho = std::log(1.0 / plan.scheme_grid.front().delta) /
                       std::log(static_cast<double>(plan.scheme_grid.front().n));
    const auto ident = check_identifiability(theta0, rho);
    if (!ident.all_identifiable) {
        std::string what = "rate_table_experiment: identifiability violated:";
        for (const auto& e : ident.entries)
            if (!e.identifiable)
                what += " " + e.parameter + " = " + std::to_string(e.value) +
                        " !< " + std::to_string(e.bound) + ";";
        throw config_error(what);
    }

    const std::size_t dim = theta0.dim();
    const auto layout = coord_layout(theta0);
    const auto comps0 = theta0.components();

    report.coord_names.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto& info = layout[i];
        const char* role = info.role == CoordRole::Scale   ? "scale"
                           : info.role == CoordRole::Hurst ? "H"
                                                           : "beta";
        report.coord_names[i] =
            std::string(role) + "_" + std::to_string(info.component + 1);
    }

    std::uint64_t cell_offset = 0;
    for (const auto& scheme : plan.scheme_grid) {
        RateCell cell;
        cell.n = scheme.n;
        cell.reps = plan.reps;
        std::vector<std::vector<double>> errors(plan.reps);
        std::vector<char> ok(plan.reps, 0);

        parallel_for_reps(plan.reps, plan.threads, [&](int r) {
            SamplingScheme s = scheme;
            s.max_gamma = std::max(s.max_gamma, plan.design.max_gamma());
            const auto path = simulate_mixed_path(
                plan.model, s, plan.base_seed, cell_offset + 16 * (r + 1));
            const auto panel = k_order_increments(path, s.k, gammas);
            try {
                auto system = make_moment_system(panel, plan.design);
                auto init = initial_guess(panel, plan.design.domain, plan.model.q());
                SolveOptions opts;
                opts.tol = 1e-9;
                const auto res = solve_estimating_equation(system, init, opts);
                if (res.converged) {
                    ok[r] = 1;
                    errors[r].resize(dim);
                    for (std::size_t i = 0; i < dim; ++i)
                        errors[r][i] = res.theta_hat.coords[i] - theta0.coords[i];
                }
            } catch (const error&) {
                ok[r] = 0;
            }
        });

        cell.rmse.assign(dim, 0.0);
        for (int r = 0; r < plan.reps; ++r) {
            if (!ok[r]) continue;
            ++cell.converged;
            for (std::size_t i = 0; i < dim; ++i)
                cell.rmse[i] += errors[r][i] * errors[r][i];
        }
        if (cell.converged > 0)
            for (std::size_t i = 0; i < dim; ++i)
                cell.rmse[i] = std::sqrt(cell.rmse[i] / cell.converged);
        cell.reliable =
            cell.converged >= static_cast<int>(0.8 * static_cast<double>(plan.reps));
        report.reliable = report.reliable && cell.reliable;
        report.cells.push_back(cell);
        cell_offset += static_cast<std::uint64_t>(plan.reps) * 16 + 64;
    }

    // Expected log-log slopes at Delta = n^{-rho} (log factors absorbed in slack).
    const double h1 = comps0[0].h;
    std::vector<double> expected(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto& c = comps0[layout[i].component];
        if (theta0.domain == ParamDomain::Adaptive) {
            expected[i] = rho * c.beta * (c.h - h1) - 0.5;
        } else {
            if (layout[i].component < 2) {
                expected[i] = rho * 2.0 * (c.h - h1) - 0.5;
            } else if (layout[i].component == 2) {
                expected[i] = rho * 0.5 * c.beta * (c.h - h1) - 0.5;
            } else {
                const auto& cs1 = comps0[2];
                expected[i] =
                    rho * (c.beta * (c.h - h1) - 0.5 * cs1.beta * (cs1.h - h1)) - 0.5;
            }
        }
    }

    std::vector<double> logn;
    for (const auto& c : report.cells) logn.push_back(std::log(static_cast<double>(c.n)));
    report.pass = report.reliable;
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> logr;
        for (const auto& c : report.cells) logr.push_back(std::log(std::max(c.rmse[i], 1e-300)));
        RateParameterFit fit;
        fit.name = report.coord_names[i];
        fit.slope = slope_fit(logn, logr, &fit.slope_se);
        fit.expected = expected[i];
        fit.slack = slope_slack;
        fit.pass = std::abs(fit.slope - fit.expected) <= slope_slack;
        report.pass = report.pass && fit.pass;
        report.fits.push_back(fit);
    }
    return report;
}

} // namespace mlfsm
