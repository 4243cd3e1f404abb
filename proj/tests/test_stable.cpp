#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlfsm/errors.hpp"
#include "mlfsm/numeric.hpp"
#include "mlfsm/stable.hpp"
#include "mlfsm/stats_tests.hpp"

using namespace mlfsm;

TEST_CASE("gaussian branch has variance 2 scale^2") {
    RngHandle rng(42, 0);
    StableLaw law{2.0, 1.0};
    const std::size_t n = 1'000'000;
    auto block = sample_stable_block(law, n, rng);
    const double var = sample_variance(block);
    CHECK(var == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("cauchy branch: sample median near zero") {
    RngHandle rng(7, 3);
    StableLaw law{1.0, 1.0};
    auto block = sample_stable_block(law, 1'000'000, rng);
    std::nth_element(block.begin(), block.begin() + block.size() / 2, block.end());
    CHECK(std::abs(block[block.size() / 2]) < 0.01);
}

TEST_CASE("characteristic function matches exp(-|lambda|^beta) on the grid") {
    const double betas[] = {0.6, 0.8, 1.0, 1.2, 1.5, 1.8, 2.0};
    const double lambdas[] = {0.25, 0.5, 1.0, 2.0};
    const std::size_t n = 1'000'000;
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    for (double beta : betas) {
        RngHandle rng(1234, static_cast<std::uint64_t>(beta * 100));
        auto block = sample_stable_block({beta, 1.0}, n, rng);
        for (double lam : lambdas) {
            const double ecf = empirical_char_fn(block, lam);
            const double target = std::exp(-std::pow(lam, beta));
            CHECK(std::abs(ecf - target) <= tol);
        }
    }
}

TEST_CASE("determinism: identical (seed, stream) reproduces identical draws") {
    RngHandle a(99, 5), b(99, 5);
    auto xa = sample_stable_block({1.5, 2.0}, 1000, a);
    auto xb = sample_stable_block({1.5, 2.0}, 1000, b);
    CHECK(xa == xb);

    // block draws equal repeated single draws on the same stream
    RngHandle c(99, 5);
    for (std::size_t i = 0; i < xa.size(); ++i)
        CHECK(xa[i] == sample_sym_stable({1.5, 2.0}, c));
}

TEST_CASE("distinct streams differ") {
    RngHandle a(99, 1), b(99, 2);
    auto xa = sample_stable_block({2.0, 1.0}, 100, a);
    auto xb = sample_stable_block({2.0, 1.0}, 100, b);
    CHECK(xa != xb);
}

TEST_CASE("scaling: scale c equals c times standard draws in law (two-sample KS)") {
    const double c = 2.5;
    RngHandle r1(2024, 11), r2(2024, 12);
    auto a = sample_stable_block({1.3, c}, 100'000, r1);
    auto b = sample_stable_block({1.3, 1.0}, 100'000, r2);
    for (auto& x : b) x *= c;
    const auto ks = ks_two_sample(a, b);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("tail bound: P(|Z| > x) x^beta bounded for beta = 0.8") {
    RngHandle rng(5, 1);
    const std::size_t n = 1'000'000;
    auto block = sample_stable_block({0.8, 1.0}, n, rng);
    std::vector<double> abs_sorted(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) abs_sorted[i] = std::abs(block[i]);
    std::sort(abs_sorted.begin(), abs_sorted.end());
    for (double x : {10.0, 20.0, 50.0, 100.0}) {
        const auto it = std::lower_bound(abs_sorted.begin(), abs_sorted.end(), x);
        const double tail =
            static_cast<double>(abs_sorted.end() - it) / static_cast<double>(n);
        const double bound = tail * std::pow(x, 0.8);
        CHECK(bound > 0.0);
        CHECK(bound < 5.0);
    }
}

TEST_CASE("empirical_char_fn basics") {
    CHECK(empirical_char_fn({0.0, 0.0, 0.0}, 3.0) == doctest::Approx(1.0));
    const double a = 0.7, lam = 1.3;
    CHECK(empirical_char_fn({-a, a}, lam) == doctest::Approx(std::cos(lam * a)));
    CHECK_THROWS_AS(empirical_char_fn({}, 1.0), input_error);

    RngHandle rng(31, 0);
    auto block = sample_stable_block({2.0, 1.0}, 1'000'000, rng);
    CHECK(empirical_char_fn(block, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(0.011));
}

TEST_CASE("parameter validation") {
    RngHandle rng(1, 1);
    CHECK_THROWS_AS(sample_sym_stable({0.0, 1.0}, rng), input_error);
    CHECK_THROWS_AS(sample_sym_stable({2.5, 1.0}, rng), input_error);
    CHECK_THROWS_AS(sample_sym_stable({1.0, -1.0}, rng), input_error);
    CHECK(sample_stable_block({1.0, 1.0}, 0, rng).empty());
}
