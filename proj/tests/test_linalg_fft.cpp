#include <doctest.h>

#include <cmath>

#include "mlfsm/fft.hpp"
#include "mlfsm/linalg.hpp"
#include "mlfsm/rng.hpp"

using namespace mlfsm;

TEST_CASE("fft round trip") {
    RngHandle rng(3, 1);
    std::vector<std::complex<double>> a(256);
    for (auto& x : a) x = {rng.next_uniform(), rng.next_uniform()};
    auto b = a;
    fft_radix2(b, false);
    fft_radix2(b, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].real() == doctest::Approx(a[i].real()).epsilon(1e-12));
        CHECK(b[i].imag() == doctest::Approx(a[i].imag()).epsilon(1e-12));
    }
}

TEST_CASE("convolution equals the direct sum, both branches") {
    RngHandle rng(9, 2);
    for (std::size_t nx : {50, 2048}) {
        for (std::size_t nh : {8, 600}) {
            std::vector<double> x(nx), h(nh);
            for (auto& v : x) v = rng.next_gaussian();
            for (auto& v : h) v = rng.next_gaussian();
            const auto out = convolve(x, h);
            REQUIRE(out.size() == nx + nh - 1);
            for (std::size_t t : {std::size_t{0}, nx / 2, nx + nh - 2}) {
                double ref = 0.0;
                for (std::size_t j = 0; j < nh; ++j)
                    if (t >= j && t - j < nx) ref += h[j] * x[t - j];
                CHECK(out[t] == doctest::Approx(ref).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("lu solve and determinant") {
    Matrix a(3, 3);
    a(0, 0) = 2; a(0, 1) = 1; a(0, 2) = 0;
    a(1, 0) = 1; a(1, 1) = 3; a(1, 2) = 1;
    a(2, 0) = 0; a(2, 1) = 1; a(2, 2) = 4;
    CHECK(determinant(a) == doctest::Approx(2 * (12 - 1) - 1 * 4).epsilon(1e-12));
    const std::vector<double> b = {1.0, 2.0, 3.0};
    const auto x = solve_linear(a, b);
    const auto back = a * x;
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(b[i]).epsilon(1e-12));

    const auto inv = inverse(a);
    const auto eye = a * inv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(eye(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("symmetric eigen and psd projection") {
    Matrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = 1.0;
    a(1, 0) = 1.0; a(1, 1) = 2.0;
    const auto eig = symmetric_eigen(a);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-10));

    Matrix ind(2, 2);
    ind(0, 0) = 1.0; ind(0, 1) = 0.0;
    ind(1, 0) = 0.0; ind(1, 1) = -0.5;
    const auto proj = project_psd(ind);
    CHECK(proj(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(proj(1, 1) == doctest::Approx(0.0).epsilon(1e-10));
    const auto e2 = symmetric_eigen(proj);
    CHECK(e2.values.front() >= -1e-12);
}

TEST_CASE("condition number of the identity is 1") {
    CHECK(condition_number_1(Matrix::identity(4)) == doctest::Approx(1.0));
}
