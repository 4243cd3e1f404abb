#include "mlfsm/moments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>

#include "mlfsm/errors.hpp"

namespace mlfsm {

namespace {

// The Fourier-side extension is taken silently up to beta = 4; one warning
// covers excursions beyond that.
void warn_beta_domain(double beta) {
    static std::atomic<bool> warned{false};
    if (beta > kBetaMax && !warned.exchange(true))
        std::fprintf(stderr,
                     "mlfsm: stability index %.3f beyond the extended ceiling %.1f; "
                     "moment values are formal\n",
                     beta, kBetaMax);
}

} // namespace

double psi_n(const ParamVector& theta, double lambda, int gamma, double delta) {
    if (lambda < 0.0) throw input_error("psi_n: lambda must be nonnegative");
    if (gamma < 1) throw input_error("psi_n: gamma must be >= 1");
    if (!(delta > 0.0)) throw input_error("psi_n: delta must be positive");
    if (lambda == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& c : theta.components()) {
        warn_beta_domain(c.beta);
        acc += c.s * std::pow(lambda, c.beta) *
               std::pow(static_cast<double>(gamma) * delta, c.beta * c.h);
    }
    return acc;
}

namespace {

// Shared term layout for the expectation integrand: per component j,
//   T_j(v) = s_j |lambda u v|^{beta_j} gamma^{beta_j h_j} delta^{beta_j h_j}.
struct TermPrefactor {
    double coef;   // s_j (lambda u)^{beta_j} (gamma delta)^{beta_j h_j}
    double beta;
};

std::vector<TermPrefactor> term_prefactors(const ParamVector& theta, double lambda,
                                           int gamma, double delta, double u) {
    std::vector<TermPrefactor> terms;
    const double lu = std::abs(lambda) * u;
    for (const auto& c : theta.components()) {
        TermPrefactor t;
        t.beta = c.beta;
        t.coef = c.s * std::pow(lu, c.beta) *
                 std::pow(static_cast<double>(gamma) * delta, c.beta * c.h);
        terms.push_back(t);
    }
    return terms;
}

double psi_terms(const std::vector<TermPrefactor>& terms, double av,
                 std::vector<double>* per_term = nullptr) {
    double acc = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const double t = terms[j].coef * std::pow(av, terms[j].beta);
        if (per_term) (*per_term)[j] = t;
        acc += t;
    }
    return acc;
}

void check_grid_resolution(const std::vector<TermPrefactor>& terms, double dv) {
    // If exp(-psi) decays to nothing within a few grid cells the trapezoid
    // cannot see the integrand.
    if (psi_terms(terms, 5.0 * dv) > 40.0)
        throw numerical_error(
            "model_expectation: rescaling concentrates the integrand below the "
            "Fourier grid resolution; check u against delta^{-H_1}");
}

} // namespace

double model_expectation(const TestFunction& f, const ParamVector& theta, double lambda,
                         int gamma, double delta, double u) {
    if (gamma < 1) throw input_error("model_expectation: gamma must be >= 1");
    if (!(delta > 0.0)) throw input_error("model_expectation: delta must be positive");
    if (!(u >= 0.0)) throw input_error("model_expectation: u must be nonnegative");

    const FourierTable& table = cached_fourier_table(f);
    const auto terms = term_prefactors(theta, lambda, gamma, delta, u);
    check_grid_resolution(terms, table.dv());

    return table.integrate([&](double v) { return std::exp(-psi_terms(terms, std::abs(v))); });
}

std::vector<double> model_expectation_gradient(const TestFunction& f,
                                               const ParamVector& theta, double lambda,
                                               int gamma, double delta, double w) {
    if (!(w > 0.0)) throw input_error("model_expectation_gradient: w must be positive");
    const double h1 = theta.h_ref();
    const double u = w * std::pow(delta, -h1);

    const FourierTable& table = cached_fourier_table(f);
    const auto comps = theta.components();
    const auto layout = coord_layout(theta);
    const auto terms = term_prefactors(theta, lambda, gamma, delta, u);
    check_grid_resolution(terms, table.dv());

    const double log_delta = std::log(delta);
    const double log_gamma = std::log(static_cast<double>(gamma));
    const double lu = std::abs(lambda) * u;

    std::vector<double> grad(theta.dim(), 0.0);
    std::vector<double> tj(comps.size());

    for (std::size_t i = 0; i < table.size(); ++i) {
        const double v = table.node(i);
        const double trap = (i == 0 || i + 1 == table.size()) ? 0.5 : 1.0;
        const double weight = trap * table.value(i) * table.dv();
        const double av = std::abs(v);
        const double e = std::exp(-psi_terms(terms, av, &tj));
        if (e == 0.0) continue;

        // d/d theta_i of psi, assembled per coordinate from the term values.
        for (std::size_t ci = 0; ci < layout.size(); ++ci) {
            const auto& info = layout[ci];
            const auto& c = comps[info.component];
            const double t = tj[info.component];
            double dpsi = 0.0;
            switch (info.role) {
                case CoordRole::Scale:
                    dpsi = t / c.s;
                    break;
                case CoordRole::Hurst:
                    dpsi = t * c.beta * (log_gamma + log_delta);
                    break;
                case CoordRole::Beta: {
                    const double x = lu * av;
                    dpsi = (x > 0.0)
                               ? t * (std::log(x) + c.h * (log_gamma + log_delta))
                               : 0.0;
                    break;
                }
            }
            // The H_1 coordinate also enters every term through u = w delta^{-H_1}:
            // d/dH_1 of |lambda u v|^{beta_j} contributes -beta_j log(delta) T_j.
            if (info.role == CoordRole::Hurst && info.component == 0) {
                double extra = 0.0;
                for (std::size_t j = 0; j < comps.size(); ++j)
                    extra -= comps[j].beta * log_delta * tj[j];
                dpsi += extra;
            }
            grad[ci] += -weight * e * dpsi;
        }
    }
    return grad;
}

} // namespace mlfsm
