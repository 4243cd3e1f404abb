#include <doctest.h>

#include <cmath>

#include "mlfsm/errors.hpp"
#include "mlfsm/kernel.hpp"
#include "mlfsm/mclab.hpp"
#include "mlfsm/numeric.hpp"

using namespace mlfsm;

namespace {

McPlan small_gaussian_plan() {
    McPlan plan;
    plan.model.components = {{1.0, 0.35, 2.0}};
    for (std::size_t n : {std::size_t{512}, std::size_t{2048}}) {
        SamplingScheme s;
        s.n = n;
        s.delta = 1.0 / static_cast<double>(n);
        s.k = 2;
        s.mesh = 8;
        s.truncation = 80;
        plan.scheme_grid.push_back(s);
    }
    plan.reps = 100;
    plan.design = default_adaptive_design(1);
    plan.base_seed = 99;
    plan.threads = 2;
    return plan;
}

} // namespace

TEST_CASE("zero panel gives zero variance statistics") {
    IncrementPanel zero;
    zero.k = 2;
    zero.delta = 0.01;
    zero.gammas = {1};
    zero.columns = {std::vector<double>(200, 0.0)};
    zero.n = 202;
    const auto f1 = make_gauss_bump(1.0);
    std::vector<double> stats(20);
    for (auto& s : stats)
        s = centered_statistic(zero, f1, {1.0, 1}, 2.0, eval_test_function(f1, 0.0));
    CHECK(sample_variance(stats) == 0.0);
    for (double s : stats) CHECK(s == 0.0);
}

TEST_CASE("variance scaling: pure gaussian ratio is stable across n") {
    const auto plan = small_gaussian_plan();
    const auto rep = mc_variance_scaling(plan, plan.design.f1);
    REQUIRE(rep.cells.size() == 2);
    CHECK(rep.cells[0].gauss_term == doctest::Approx(1.0));   // u_n delta^{H_1} = 1
    CHECK(rep.cells[0].var_s > 0.0);
    CHECK(rep.pass);
    // reproducibility: bit-identical on a second run
    const auto rep2 = mc_variance_scaling(plan, plan.design.f1);
    CHECK(rep.cells[0].var_s == rep2.cells[0].var_s);
    CHECK(rep.cells[1].var_s == rep2.cells[1].var_s);
}

TEST_CASE("variance scaling is thread-count invariant") {
    auto plan = small_gaussian_plan();
    plan.reps = 60;
    plan.threads = 1;
    const auto rep1 = mc_variance_scaling(plan, plan.design.f1);
    plan.threads = 2;
    const auto rep2 = mc_variance_scaling(plan, plan.design.f1);
    CHECK(rep1.cells[0].var_s == rep2.cells[0].var_s);
    CHECK(rep1.cells[1].var_s == rep2.cells[1].var_s);
}

TEST_CASE("clt regime validation rejects mismatched plans") {
    auto plan = small_gaussian_plan();
    // pure Gaussian data cannot sit in the stable-dominant case (ii)
    CHECK_THROWS_AS(mc_clt_check(plan, plan.design.f1, CltCase::II), config_error);
}

TEST_CASE("clt case (i) on a small gaussian plan") {
    auto plan = small_gaussian_plan();
    plan.reps = 120;
    const auto rep = mc_clt_check(plan, plan.design.f1, CltCase::I);
    REQUIRE(!rep.cells.empty());
    CHECK(!rep.cells.back().degenerate);
    CHECK(rep.cells.back().ks_p > 0.001);
}

TEST_CASE("clt case (iii): vanishing stable-dominant statistic is normal") {
    McPlan plan;
    plan.model.components = {{1.0, 0.7, 1.5}};
    SamplingScheme s;
    s.n = 4096;
    s.delta = 1.0 / 4096;
    s.k = 2;
    s.mesh = 8;
    plan.scheme_grid = {s};
    plan.reps = 100;
    plan.design = default_threshold_design();   // w_n-rescaled moments
    plan.design.w_sigma = 1.0;
    plan.base_seed = 61;
    plan.threads = 2;
    const auto rep = mc_clt_check(plan, plan.design.f2, CltCase::III);
    CHECK(!rep.cells.back().degenerate);
    CHECK(rep.cells.back().ks_p > 0.01);
}

TEST_CASE("clt cases (iv) and (v) at a larger desk cell") {
    SamplingScheme s;
    s.n = std::size_t{1} << 16;
    s.delta = 1.0 / static_cast<double>(s.n);
    s.k = 2;
    s.mesh = 8;

    // (iv): Gaussian-dominant vanishing regime, quadratic test function
    McPlan gauss;
    gauss.model.components = {{1.0, 0.5, 2.0}};
    gauss.scheme_grid = {s};
    gauss.reps = 60;
    gauss.design = default_threshold_design();
    gauss.design.f2 = make_smooth_threshold(4.0, 1.0, 0.05);
    gauss.design.w_sigma = 1.0;
    gauss.base_seed = 62;
    gauss.threads = 2;
    const auto rep4 = mc_clt_check(gauss, gauss.design.f1, CltCase::IV);
    CHECK(rep4.cells.back().ks_p > 0.01);

    // (v): joint gauss-bump / smooth-threshold statistic with vanishing
    // cross-correlation
    McPlan joint;
    joint.model.components = {{1.0, 0.5, 2.0}, {10.0, 0.857, 1.5}};
    joint.scheme_grid = {s};
    joint.reps = 60;
    joint.design = default_threshold_design();
    joint.design.f2 = make_smooth_threshold(9.0, 1.0, 0.02);
    joint.design.w_sigma = std::sqrt(2.0);
    joint.base_seed = 63;
    joint.threads = 2;
    const auto rep5 = mc_clt_check(joint, joint.design.f1, CltCase::V);
    CHECK(rep5.cells.back().ks_p > 0.01);
    CHECK(std::abs(rep5.cells.back().cross_corr) < 4.0 / std::sqrt(60.0));
}

TEST_CASE("degenerate statistics are reported as such") {
    auto plan = small_gaussian_plan();
    plan.reps = 50;
    // a threshold so wide that every statistic is exactly zero
    const auto dead = make_smooth_threshold(100.0, 0.5, 1.0);
    const auto rep = mc_clt_check(plan, dead, CltCase::I);
    CHECK(rep.cells.back().degenerate);
    CHECK(rep.regime_note == "degenerate");
    CHECK(rep.pass);
}

TEST_CASE("asymp cov G: dead threshold design gives the zero matrix") {
    ParamVector theta = ParamVector::adaptive({{1.0, 0.4, 2.0}});
    MomentDesign d = default_adaptive_design(1);
    d.f1 = make_smooth_threshold(1000.0, 0.5, 1.0);
    McCovOptions opts;
    opts.path_length = 4096;
    opts.k = 2;
    const auto est = estimate_asymp_cov_G(theta, d, opts);
    for (std::size_t i = 0; i < est.sigma.rows(); ++i)
        for (std::size_t j = 0; j < est.sigma.cols(); ++j)
            CHECK(est.sigma(i, j) == 0.0);
}

TEST_CASE("asymp cov G matches the exact gaussian lag sum") {
    // q = 1 Gaussian: Cov(f1(lam_r b Y_{z,g_r}), f1(lam_s b Y_{0,g_s})) has the
    // closed form 1/sqrt(det(I + S)) - 1/sqrt((1+s_rr)(1+s_ss)).
    const double H = 0.4;
    const int k = 2;
    ParamVector theta = ParamVector::adaptive({{1.0, H, 2.0}});
    MomentDesign d = default_adaptive_design(1);
    McCovOptions opts;
    opts.path_length = 1 << 16;
    opts.k = k;
    opts.mesh = 8;
    const auto est = estimate_asymp_cov_G(theta, d, opts);

    const double b1 = std::pow(1.0 / kernel_norm(H, 2.0, k), 0.5);
    auto exact_entry = [&](std::size_t r, std::size_t s) {
        const double lr = d.tuples[r].lambda, ls = d.tuples[s].lambda;
        const int gr = d.tuples[r].gamma, gs = d.tuples[s].gamma;
        const double vr = lr * lr * b1 * b1 * fbm_kdiff_cov(H, k, gr, gr, 0);
        const double vs = ls * ls * b1 * b1 * fbm_kdiff_cov(H, k, gs, gs, 0);
        double acc = 0.0;
        for (long z = -64; z <= 64; ++z) {
            const double c = lr * ls * b1 * b1 * fbm_kdiff_cov(H, k, gr, gs, z);
            const double det = (1.0 + vr) * (1.0 + vs) - c * c;
            acc += 1.0 / std::sqrt(det) - 1.0 / std::sqrt((1.0 + vr) * (1.0 + vs));
        }
        return acc;
    };
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t s = 0; s < 3; ++s) {
            const double exact = exact_entry(r, s);
            CHECK(est.sigma(r, s) == doctest::Approx(exact).epsilon(0.25));
        }
}

TEST_CASE("threshold asymptotic covariances") {
    ParamVector theta =
        ParamVector::threshold(1.0, 0.4, 0.5, 0.55, 0.6, 0.6, 1.4, 0.3, 0.75, 1.1);
    MomentDesign d = default_threshold_design();
    McCovOptions opts;
    opts.path_length = 1 << 16;
    opts.k = 2;
    const auto est = estimate_asymp_cov_threshold(theta, d, opts);

    // Sigma_1 structural check: with all lambda equal it is proportional to the
    // squared-covariance lag sums
    const double a1 = std::pow(1.0 / kernel_norm(0.4, 2.0, 2), 0.5);
    auto s1_exact = [&](std::size_t r, std::size_t s) {
        const int gr = d.tuples[r].gamma, gs = d.tuples[s].gamma;
        double acc = 0.0;
        for (long z = -128; z <= 128; ++z)
            acc += std::pow(fbm_kdiff_cov(0.4, 2, gr, gs, z), 2.0);
        return 0.25 * std::pow(a1, 4.0) * acc;
    };
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t s = 0; s < 4; ++s)
            CHECK(est.sigma1.sigma(r, s) == doctest::Approx(s1_exact(r, s)).epsilon(1e-6));

    // PSD after projection
    const auto e1 = symmetric_eigen(est.sigma1.sigma);
    const auto e2 = symmetric_eigen(est.sigma2.sigma);
    CHECK(e1.values.front() >= -1e-12);
    CHECK(e2.values.front() >= -1e-12);
    CHECK(est.sigma1.min_eig_before >= -1e-10);
    CHECK(est.sigma2.richardson_levels.size() == 3);
}

TEST_CASE("finite-h quotients self-converge when the schedule resolves the tail") {
    // A heavy dominant stable component keeps the smallest h level populated;
    // the final Richardson levels then agree within 5%.
    ParamVector theta =
        ParamVector::threshold(1.0, 0.4, 0.5, 0.55, 7.0, 0.6, 0.9, 0.3, 0.75, 1.0);
    REQUIRE(theta.in_domain());
    MomentDesign d = default_threshold_design();
    McCovOptions opts;
    opts.path_length = std::size_t{1} << 18;
    opts.k = 2;
    const auto est = estimate_asymp_cov_threshold(theta, d, opts);
    const auto& levels = est.sigma2.richardson_levels;
    REQUIRE(levels.size() == 3);
    CHECK(std::abs(levels[2] - levels[1]) / std::abs(levels[2]) < 0.05);
}

TEST_CASE("lag-sum truncation is monotone in z_cap") {
    // The stop rule is data-driven (truncation level or the noise floor), so
    // extending the cap does not change the reported entries.
    ParamVector theta = ParamVector::adaptive({{1.0, 0.4, 2.0}});
    MomentDesign d = default_adaptive_design(1);
    McCovOptions a, b;
    a.path_length = b.path_length = 1 << 15;
    a.k = b.k = 2;
    a.z_cap = 64;
    b.z_cap = 192;
    const auto ea = estimate_asymp_cov_G(theta, d, a);
    const auto eb = estimate_asymp_cov_G(theta, d, b);
    CHECK(ea.z_used == eb.z_used);
    CHECK(ea.z_used < 64);
    double scale = 0.0;
    for (std::size_t i = 0; i < 3; ++i) scale = std::max(scale, std::abs(eb.sigma(i, i)));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(ea.sigma(i, j) - eb.sigma(i, j)) <= 1e-12 * scale);
}

TEST_CASE("rate experiment refuses infeasible plans before simulating") {
    McPlan plan;
    plan.model.components = {{1.0, 0.2, 2.0}, {1.0, 0.9, 2.0}};   // H2 far beyond H1+1/4
    SamplingScheme s;
    s.n = 512;
    s.delta = 1.0 / 512;
    s.k = 2;
    plan.scheme_grid = {s};
    plan.reps = 50;
    plan.design = default_adaptive_design(2);
    CHECK_THROWS_WITH_AS(rate_table_experiment(plan), doctest::Contains("identifiability"),
                         config_error);
}

TEST_CASE("rate experiment on a small gaussian grid finds the root-n slope") {
    McPlan plan;
    plan.model.components = {{1.0, 0.35, 2.0}};
    for (std::size_t n : {std::size_t{512}, std::size_t{2048}, std::size_t{8192}}) {
        SamplingScheme s;
        s.n = n;
        s.delta = 1.0 / static_cast<double>(n);
        s.k = 2;
        s.mesh = 8;
        s.truncation = 60;
        plan.scheme_grid.push_back(s);
    }
    plan.reps = 60;
    plan.design = default_adaptive_design(1);
    plan.base_seed = 4242;
    plan.threads = 2;
    const auto rep = rate_table_experiment(plan, 0.35);
    REQUIRE(rep.cells.size() == 3);
    CHECK(rep.reliable);
    // H_1 slope near -1/2
    bool found = false;
    for (const auto& fit : rep.fits)
        if (fit.name == "H_1") {
            found = true;
            CHECK(fit.expected == doctest::Approx(-0.5));
            CHECK(std::abs(fit.slope + 0.5) < 0.35);
        }
    CHECK(found);
}
