#include "mlfsm/determinants.hpp"

#include <cmath>

#include "mlfsm/errors.hpp"

namespace mlfsm {

namespace {

double log2_of(double x) { return std::log2(x); }

Matrix reduced_w1(double H1, double H2) {
    const int gammas[4] = {1, 2, 4, 8};
    Matrix m(4, 4);
    for (int i = 0; i < 4; ++i) {
        const double g = gammas[i];
        m(i, 0) = std::pow(g, 2.0 * H1);
        m(i, 1) = std::pow(g, 2.0 * H1) * log2_of(g);
        m(i, 2) = std::pow(g, 2.0 * H2);
        m(i, 3) = std::pow(g, 2.0 * H2) * log2_of(g);
    }
    return m;
}

Matrix reduced_w2(const int (&gammas)[6], const double (&lambdas)[6], double H1,
                  double beta1, double H2, double beta2) {
    Matrix m(6, 6);
    const double H[2] = {H1, H2};
    const double B[2] = {beta1, beta2};
    for (int i = 0; i < 6; ++i) {
        const double g = gammas[i];
        const double l = lambdas[i];
        for (int j = 0; j < 2; ++j) {
            const double base = std::pow(g, B[j] * H[j]) * std::pow(l, B[j]);
            m(i, 3 * j + 0) = base;
            m(i, 3 * j + 1) = base * log2_of(g);
            m(i, 3 * j + 2) = base * log2_of(l);
        }
    }
    return m;
}

} // namespace

DeterminantCheck regularity_determinants(RegularityCase c, double H1, double beta1,
                                         double H2, double beta2) {
    DeterminantCheck out;
    switch (c) {
        case RegularityCase::I: {
            out.reduced = reduced_w1(H1, H2);
            const double a = std::pow(2.0, H1);
            const double b = std::pow(2.0, H2);
            out.closed_form = std::pow(2.0, 2.0 * H1 + 2.0 * H2) *
                              std::pow(a - b, 4.0) * std::pow(a + b, 4.0);
            out.singular_when = "H1 = H2";
            break;
        }
        case RegularityCase::II: {
            const int gam[6] = {1, 2, 2, 4, 4, 8};
            const double lam[6] = {1, 2, 4, 8, 16, 32};
            out.reduced = reduced_w2(gam, lam, H1, beta1, H2, beta2);
            const double e1 = std::pow(2.0, beta1 + H1 * beta1);
            const double e2 = std::pow(2.0, beta2 + H2 * beta2);
            const double d1 = std::pow(2.0, 2.0 * beta1 + H1 * beta1);
            const double d2 = std::pow(2.0, 2.0 * beta2 + H2 * beta2);
            out.closed_form =
                std::pow(2.0, 3.0 * beta1 + 3.0 * beta2 + 2.0 * H1 * beta1 +
                                  2.0 * H2 * beta2) *
                (e1 - e2) * std::pow(d1 - d2, 4.0);
            out.singular_when = "beta1(1+H1) = beta2(1+H2) or beta1(2+H1) = beta2(2+H2)";
            break;
        }
        case RegularityCase::III: {
            const int gam[6] = {1, 2, 2, 4, 8, 8};
            const double lam[6] = {1, 1, 2, 1, 1, 2};
            out.reduced = reduced_w2(gam, lam, H1, beta1, H2, beta2);
            const double p1 = std::pow(2.0, H1 * beta1);
            const double p2 = std::pow(2.0, H2 * beta2);
            out.closed_form = -std::pow(2.0, beta1 + beta2 + 2.0 * H1 * beta1 +
                                                 2.0 * H2 * beta2) *
                              std::pow(p1 - p2, 5.0) * (p1 + p2);
            out.singular_when = "H1 beta1 = H2 beta2";
            break;
        }
        default:
            throw config_error("regularity_determinants: unsupported design");
    }
    out.numeric = determinant(out.reduced);
    return out;
}

} // namespace mlfsm
