#include "mlfsm/estimators.hpp"

#include <cmath>
#include <string>

#include "mlfsm/errors.hpp"
#include "mlfsm/numeric.hpp"

namespace mlfsm {

std::vector<double> statistic_S(const IncrementPanel& panel, const TestFunction& f,
                                double u, const std::vector<MomentTuple>& tuples) {
    std::vector<double> out;
    out.reserve(tuples.size());
    for (const auto& t : tuples) {
        const auto& col = panel.column_for(t.gamma);
        const double scale = u * t.lambda;
        out.push_back(pairwise_mean(col, [&](double x) {
            return eval_test_function(f, scale * x);
        }));
    }
    return out;
}

std::vector<double> statistic_S(const IncrementPanel& panel, const MomentDesign& design,
                                double u) {
    std::vector<double> out;
    out.reserve(design.dim());
    for (std::size_t r = 0; r < design.dim(); ++r) {
        const auto& t = design.tuples[r];
        const auto& col = panel.column_for(t.gamma);
        const auto& f = design.function_for(r);
        const double scale = u * t.lambda;
        out.push_back(pairwise_mean(col, [&](double x) {
            return eval_test_function(f, scale * x);
        }));
    }
    return out;
}

std::vector<double> moment_model_part(const ParamVector& theta, const MomentDesign& design,
                                      double delta) {
    const double u = design.w_factor(delta) * std::pow(delta, -theta.h_ref());
    std::vector<double> out;
    out.reserve(design.dim());
    for (std::size_t r = 0; r < design.dim(); ++r) {
        const auto& t = design.tuples[r];
        out.push_back(model_expectation(design.function_for(r), theta, std::abs(t.lambda),
                                        t.gamma, delta, u));
    }
    return out;
}

std::vector<double> moment_function(const ParamVector& theta, const IncrementPanel& panel,
                                    const MomentDesign& design) {
    if (theta.domain != design.domain)
        throw config_error("moment_function: theta and design domains disagree");
    if (design.dim() != theta.dim())
        throw config_error("moment_function: tuple count " + std::to_string(design.dim()) +
                           " does not match the parameter dimension " +
                           std::to_string(theta.dim()));
    const double delta = panel.delta;
    const double u = design.w_factor(delta) * std::pow(delta, -theta.h_ref());
    auto s = statistic_S(panel, design, u);
    const auto e = moment_model_part(theta, design, delta);
    for (std::size_t r = 0; r < s.size(); ++r) s[r] -= e[r];
    return s;
}

Matrix rate_matrix_Cbar(const ParamVector& theta, std::size_t n, double delta) {
    if (theta.domain != ParamDomain::Adaptive)
        throw input_error("rate_matrix_Cbar: adaptive parameter vector required");
    const auto comps = theta.components();
    const double h1 = comps[0].h;
    const double log_d = std::log(delta);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Matrix out(theta.dim(), theta.dim());
    for (std::size_t j = 0; j < comps.size(); ++j) {
        const auto& c = comps[j];
        const double scale = std::pow(delta, c.beta * (h1 - c.h)) / sqrt_n;
        Matrix blk(3, 3);
        blk(0, 0) = 1.0;
        blk(0, 1) = (j != 0) ? -c.s * c.beta * log_d : 0.0;
        blk(0, 2) = (j != 0) ? c.s * c.h * log_d : 0.0;
        blk(1, 1) = 1.0;
        blk(1, 2) = -c.h / c.beta;
        blk(2, 2) = 1.0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) blk(a, b) *= scale;
        out.set_block(3 * j, 3 * j, blk);
    }
    return out;
}

Matrix rate_matrix_R(const ParamVector& theta, std::size_t n, double delta, double w_n) {
    if (theta.domain != ParamDomain::Threshold)
        throw input_error("rate_matrix_R: threshold parameter vector required");
    const auto comps = theta.components();
    const double h1 = comps[0].h;
    const double hb1 = comps[2].h;
    const double beta1 = comps[2].beta;
    const double log_d = std::log(delta);
    const double log_w = std::log(std::abs(w_n));
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    Matrix out(10, 10);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& c = comps[j];
        const double scale = std::pow(delta, 2.0 * (h1 - c.h)) / sqrt_n;
        Matrix blk(2, 2);
        blk(0, 0) = 1.0;
        blk(0, 1) = (j != 0) ? -2.0 * c.s * log_d : 0.0;
        blk(1, 1) = 1.0;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) blk(a, b) *= scale;
        out.set_block(2 * j, 2 * j, blk);
    }
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& c = comps[2 + j];
        const double expo = 0.5 * beta1 * (hb1 - h1) - c.beta * (c.h - h1);
        const double scale =
            std::pow(w_n, 0.5 * beta1 - c.beta) * std::pow(delta, expo) / sqrt_n;
        Matrix blk(3, 3);
        blk(0, 0) = 1.0;
        blk(0, 2) = -c.s * log_w;
        blk(1, 1) = 1.0;
        blk(1, 2) = -c.h / c.beta;
        blk(2, 2) = 1.0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) blk(a, b) *= scale;
        out.set_block(4 + 3 * j, 4 + 3 * j, blk);
    }
    return out;
}

namespace {

// Base integrals over the Fourier table with the dominant-component damping
//   I = int fhat(v) exp(-s0 |w lam v|^{b0} g^{b0 h0}) |lam v|^{beta} dv,
//   L = same with an extra log|lam v| factor.
struct WIntegrals {
    double plain = 0.0;
    double logw = 0.0;
};

WIntegrals w_integrals(const FourierTable& table, double s0, double h0, double b0,
                       double w, double lambda, int gamma, double beta) {
    const double gpow = std::pow(static_cast<double>(gamma), b0 * h0);
    const double wl = std::abs(w * lambda);
    WIntegrals acc;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double v = table.node(i);
        const double trap = (i == 0 || i + 1 == table.size()) ? 0.5 : 1.0;
        const double av = std::abs(lambda * v);
        if (av == 0.0) continue;
        const double damp =
            (w == 0.0) ? 1.0 : std::exp(-s0 * std::pow(wl * std::abs(v), b0) * gpow);
        const double base = trap * table.value(i) * damp * std::pow(av, beta);
        acc.plain += base;
        acc.logw += base * std::log(av);
    }
    acc.plain *= table.dv();
    acc.logw *= table.dv();
    return acc;
}

} // namespace

Matrix W_bar(const ParamVector& theta, const MomentDesign& design) {
    if (theta.domain != ParamDomain::Adaptive || design.domain != ParamDomain::Adaptive)
        throw input_error("W_bar: adaptive domain required");
    const auto comps = theta.components();
    const auto& table = cached_fourier_table(design.f1);
    const double s0 = comps[0].s, h0 = comps[0].h, b0 = comps[0].beta;

    Matrix out(design.dim(), theta.dim());
    for (std::size_t r = 0; r < design.dim(); ++r) {
        const auto& t = design.tuples[r];
        const double log_gamma = std::log(static_cast<double>(t.gamma));
        for (std::size_t j = 0; j < comps.size(); ++j) {
            const auto& c = comps[j];
            const auto ints =
                w_integrals(table, s0, h0, b0, 1.0, t.lambda, t.gamma, c.beta);
            const double gpow = std::pow(static_cast<double>(t.gamma), c.beta * c.h);
            out(r, 3 * j + 0) = gpow * ints.plain;
            out(r, 3 * j + 1) = c.s * c.beta * log_gamma * gpow * ints.plain;
            out(r, 3 * j + 2) = c.s * gpow * (c.h * log_gamma * ints.plain + ints.logw);
        }
    }
    return out;
}

Matrix W_underline(const ParamVector& theta, const MomentDesign& design) {
    if (theta.domain != ParamDomain::Threshold || design.domain != ParamDomain::Threshold)
        throw input_error("W_underline: threshold domain required");
    const auto comps = theta.components();
    const double f1_dd0 = -design.f1.decay;   // f1''(0) of the gauss-bump
    const auto& table2 = cached_fourier_table(design.f2);

    Matrix out(10, 10);
    // W1: f1 tuples (rows 0..3) against the Gaussian coordinates.
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& t = design.tuples[r];
        const double lam2 = t.lambda * t.lambda;
        const double log_gamma = std::log(static_cast<double>(t.gamma));
        for (std::size_t j = 0; j < 2; ++j) {
            const auto& c = comps[j];
            const double gpow = std::pow(static_cast<double>(t.gamma), 2.0 * c.h);
            out(r, 2 * j + 0) = f1_dd0 * lam2 * gpow;
            out(r, 2 * j + 1) = f1_dd0 * lam2 * c.s * 2.0 * log_gamma * gpow;
        }
    }
    // W2: f2 tuples (rows 4..9) against the stable coordinates.
    for (std::size_t r = 4; r < 10; ++r) {
        const auto& t = design.tuples[r];
        const double log_gamma = std::log(static_cast<double>(t.gamma));
        for (std::size_t j = 0; j < 2; ++j) {
            const auto& c = comps[2 + j];
            const auto ints = w_integrals(table2, 0.0, 0.0, 2.0, 0.0, t.lambda, t.gamma,
                                          c.beta);
            const double gpow = std::pow(static_cast<double>(t.gamma), c.beta * c.h);
            out(r, 4 + 3 * j + 0) = gpow * ints.plain;
            out(r, 4 + 3 * j + 1) = c.s * c.beta * log_gamma * gpow * ints.plain;
            out(r, 4 + 3 * j + 2) = c.s * gpow * (c.h * log_gamma * ints.plain + ints.logw);
        }
    }
    return out;
}

double threshold_dn(const ParamVector& theta, double delta, double w_n) {
    const auto comps = theta.components();
    const double h1 = comps[0].h;
    double dn = 0.0;
    for (std::size_t j = 2; j < 4; ++j) {
        const auto& c = comps[j];
        dn = std::max(dn, std::pow(w_n, 0.5 * c.beta) *
                              std::pow(delta, 0.5 * c.beta * (c.h - h1)));
    }
    return dn;
}

Matrix solver_C(const ParamVector& theta, double delta, double w_n) {
    const auto comps = theta.components();
    const double h1 = comps[0].h;
    const double log_d = std::log(delta);
    const double log_w = std::log(w_n);

    // The log-delta mixings are needed in every block: differentiating the
    // estimating function at fixed data puts a log(delta) term into each H and
    // beta coordinate, and these columns cancel it so D F_n(theta) C(theta)
    // converges to the W limit below (checked against finite differences).
    if (theta.domain == ParamDomain::Adaptive) {
        Matrix out(theta.dim(), theta.dim());
        for (std::size_t j = 0; j < comps.size(); ++j) {
            const auto& c = comps[j];
            const double scale =
                std::pow(w_n, -c.beta) * std::pow(delta, c.beta * (h1 - c.h));
            Matrix blk(3, 3);
            blk(0, 0) = 1.0;
            blk(0, 1) = -c.s * c.beta * log_d;
            blk(0, 2) = c.s * (-log_w + h1 * log_d);
            blk(1, 1) = 1.0;
            blk(1, 2) = -c.h / c.beta;
            blk(2, 2) = 1.0;
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) blk(a, b) *= scale;
            out.set_block(3 * j, 3 * j, blk);
        }
        return out;
    }

    const double dn = threshold_dn(theta, delta, w_n);
    Matrix out(10, 10);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& c = comps[j];
        const double scale = std::pow(w_n, -2.0) * std::pow(delta, 2.0 * (h1 - c.h));
        Matrix blk(2, 2);
        blk(0, 0) = 1.0;
        blk(0, 1) = -2.0 * c.s * log_d;
        blk(1, 1) = 1.0;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) blk(a, b) *= scale;
        out.set_block(2 * j, 2 * j, blk);
    }
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& c = comps[2 + j];
        const double scale =
            std::pow(w_n, -c.beta) * std::pow(delta, c.beta * (h1 - c.h)) * dn;
        Matrix blk(3, 3);
        blk(0, 0) = 1.0;
        blk(0, 1) = -c.s * c.beta * log_d;
        blk(0, 2) = c.s * (-log_w + h1 * log_d);
        blk(1, 1) = 1.0;
        blk(1, 2) = -c.h / c.beta;
        blk(2, 2) = 1.0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) blk(a, b) *= scale;
        out.set_block(4 + 3 * j, 4 + 3 * j, blk);
    }
    return out;
}

std::vector<double> solver_B_diag(const ParamVector& theta, double delta, double w_n) {
    if (theta.domain == ParamDomain::Adaptive)
        return std::vector<double>(theta.dim(), 1.0);
    const double dn = threshold_dn(theta, delta, w_n);
    std::vector<double> b(10, 1.0);
    for (std::size_t i = 4; i < 10; ++i) b[i] = 1.0 / dn;
    return b;
}

Matrix W_gradient_limit(const ParamVector& theta, const MomentDesign& design, double w) {
    const auto comps = theta.components();
    const double s0 = comps[0].s, h0 = comps[0].h, b0 = comps[0].beta;
    const auto layout = coord_layout(theta);
    Matrix out(design.dim(), theta.dim());

    // One integral pair per (row, component); coordinates of a component share it.
    std::vector<WIntegrals> ints(comps.size());
    for (std::size_t r = 0; r < design.dim(); ++r) {
        const auto& t = design.tuples[r];
        const auto& table = cached_fourier_table(design.function_for(r));
        const double log_gamma = std::log(static_cast<double>(t.gamma));
        const bool f2_row = design.uses_f2(r);
        for (std::size_t j = 0; j < comps.size(); ++j)
            ints[j] = w_integrals(table, s0, h0, b0, w, t.lambda, t.gamma, comps[j].beta);
        for (std::size_t i = 0; i < layout.size(); ++i) {
            const auto& info = layout[i];
            // The threshold system is block-diagonal in the limit: f1 rows
            // carry the Gaussian coordinates, f2 rows the stable ones.
            if (theta.domain == ParamDomain::Threshold) {
                const bool stable_coord = info.component >= 2;
                if (f2_row != stable_coord) {
                    out(r, i) = 0.0;
                    continue;
                }
            }
            const auto& c = comps[info.component];
            const auto& wi = ints[info.component];
            const double gpow = std::pow(static_cast<double>(t.gamma), c.beta * c.h);
            switch (info.role) {
                case CoordRole::Scale:
                    out(r, i) = -gpow * wi.plain;
                    break;
                case CoordRole::Hurst:
                    out(r, i) = -c.s * c.beta * log_gamma * gpow * wi.plain;
                    break;
                case CoordRole::Beta:
                    out(r, i) = -c.s * gpow * wi.logw;
                    break;
            }
        }
    }
    return out;
}

} // namespace mlfsm
