#include "mlfsm/solver.hpp"

#include <algorithm>
#include <cmath>

#include "mlfsm/errors.hpp"
#include "mlfsm/numeric.hpp"

namespace mlfsm {

namespace {

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Clamp coordinates into the extended search box and restore the Hurst
// ordering by sort-and-perturb. Returns whether an H-ordering fix was needed.
bool project_into_domain(ParamVector& theta) {
    constexpr double kHLo = 0.01, kHHi = 0.99, kPerturb = 1e-4;
    const auto layout = coord_layout(theta);
    for (std::size_t i = 0; i < theta.dim(); ++i) {
        auto& x = theta.coords[i];
        switch (layout[i].role) {
            case CoordRole::Scale: x = std::max(x, 1e-10); break;
            case CoordRole::Hurst: x = std::clamp(x, kHLo, kHHi); break;
            case CoordRole::Beta: x = std::clamp(x, 0.05, kBetaMax); break;
        }
    }

    bool reordered = false;
    if (theta.domain == ParamDomain::Adaptive) {
        // H coordinates sit at 3j+1; sort the component triples by H.
        const std::size_t q = theta.q();
        std::vector<std::size_t> order(q);
        for (std::size_t j = 0; j < q; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return theta.coords[3 * a + 1] < theta.coords[3 * b + 1];
        });
        for (std::size_t j = 0; j < q; ++j) reordered = reordered || (order[j] != j);
        if (reordered) {
            auto old = theta.coords;
            for (std::size_t j = 0; j < q; ++j)
                for (std::size_t c = 0; c < 3; ++c)
                    theta.coords[3 * j + c] = old[3 * order[j] + c];
        }
        for (std::size_t j = 1; j < q; ++j) {
            if (theta.coords[3 * j + 1] <= theta.coords[3 * (j - 1) + 1]) {
                theta.coords[3 * j + 1] = theta.coords[3 * (j - 1) + 1] + kPerturb;
                reordered = true;
            }
        }
    } else {
        // H_1 must stay strictly below H_2, Hbar_1, Hbar_2.
        double& h1 = theta.coords[1];
        for (std::size_t idx : {std::size_t{3}, std::size_t{5}, std::size_t{8}}) {
            if (theta.coords[idx] <= h1) {
                theta.coords[idx] = h1 + kPerturb;
                reordered = true;
            }
        }
        // tail ordering (Hbar_1 - H_1) beta_1 < (Hbar_2 - H_1) beta_2
        const double lhs = (theta.coords[5] - h1) * theta.coords[6];
        const double rhs = (theta.coords[8] - h1) * theta.coords[9];
        if (!(lhs < rhs)) {
            theta.coords[8] = h1 + (lhs / theta.coords[9]) + kPerturb;
            theta.coords[8] = std::min(theta.coords[8], 0.99);
            reordered = true;
        }
    }
    return reordered;
}

// Evaluation failures inside the extended search box (for example quadrature
// guards tripping at extreme iterates) reject the point rather than abort.
std::optional<std::vector<double>> try_eval(const MomentSystem& system,
                                            const ParamVector& theta) {
    try {
        return system.F(theta);
    } catch (const error&) {
        return std::nullopt;
    }
}

Matrix fd_jacobian(const MomentSystem& system, const ParamVector& theta,
                   const std::vector<double>& f0, double fd_step) {
    const std::size_t d = theta.dim();
    Matrix jac(f0.size(), d);
    for (std::size_t j = 0; j < d; ++j) {
        const double h = fd_step * (1.0 + std::abs(theta.coords[j]));
        ParamVector tp = theta, tm = theta;
        tp.coords[j] += h;
        tm.coords[j] -= h;
        project_into_domain(tp);
        project_into_domain(tm);
        const double denom = tp.coords[j] - tm.coords[j];
        const auto fp = try_eval(system, tp);
        const auto fm = try_eval(system, tm);
        if (!fp || !fm)
            throw solver_error(
                "solve_estimating_equation: moment function not evaluable near the "
                "iterate while forming the finite-difference Jacobian");
        for (std::size_t i = 0; i < f0.size(); ++i)
            jac(i, j) = ((*fp)[i] - (*fm)[i]) / denom;
    }
    return jac;
}

} // namespace

MomentSystem make_moment_system(const IncrementPanel& panel, const MomentDesign& design) {
    design.validate();
    MomentSystem sys;
    sys.domain = design.domain;
    const double delta = panel.delta;
    const double w = design.w_factor(delta);
    const double w_limit = (design.domain == ParamDomain::Adaptive) ? 1.0 : 0.0;

    sys.F = [panel, design](const ParamVector& theta) {
        return moment_function(theta, panel, design);
    };
    sys.C = [delta, w](const ParamVector& theta) { return solver_C(theta, delta, w); };
    sys.W = [design, w_limit](const ParamVector& theta) {
        return W_gradient_limit(theta, design, w_limit);
    };
    sys.B_diag = [delta, w](const ParamVector& theta) {
        return solver_B_diag(theta, delta, w);
    };
    return sys;
}

namespace {

EstimationResult solve_single(const MomentSystem& system, const ParamVector& theta_init,
                              const SolveOptions& opts, double h_anchor) {
    // Keep the rescaling coordinate H_1 inside the trust box: the fixed point
    // is only locally unique, and outside the box a degenerate root family
    // appears where every rescaled moment is essentially zero.
    auto project_local = [&](ParamVector& theta) {
        bool moved = project_into_domain(theta);
        const double lo = std::max(0.01, h_anchor - opts.trust_radius_h);
        const double hi = std::min(0.99, h_anchor + opts.trust_radius_h);
        if (theta.coords[1] < lo || theta.coords[1] > hi) {
            theta.coords[1] = std::clamp(theta.coords[1], lo, hi);
            project_into_domain(theta);
            moved = true;
        }
        return moved;
    };

    EstimationResult res;
    res.theta_hat = theta_init;
    project_local(res.theta_hat);

    auto f0 = try_eval(system, res.theta_hat);
    if (!f0)
        throw solver_error(
            "solve_estimating_equation: moment function not evaluable at the initial "
            "point");
    auto f = *f0;
    res.residual_norm = sup_norm(f);
    int iterations = 0;

    const bool have_matrices = static_cast<bool>(system.C) && static_cast<bool>(system.W);
    bool try_contraction =
        have_matrices && opts.method != SolveMethod::Newton;
    bool contraction_used = false, newton_used = false;

    ParamVector best_theta = res.theta_hat;
    double best_norm = res.residual_norm;

    // Primary path: fixed-point iteration theta <- theta + C W^{-1} B F.
    if (try_contraction) {
        contraction_used = true;
        ParamVector theta = res.theta_hat;
        int bad_steps = 0, projections = 0;
        while (iterations < opts.max_iter && best_norm > opts.tol) {
            Matrix w_mat;
            try {
                w_mat = system.W(theta);
            } catch (const error&) {
                break;   // W not evaluable here: hand off to Newton
            }
            auto lu = lu_decompose(w_mat);
            if (lu.singular || condition_number_1(w_mat) > opts.w_condition_cap) {
                if (opts.method == SolveMethod::Contraction)
                    throw solver_error(
                        "solve_estimating_equation: W(theta) is singular or "
                        "ill-conditioned at the iterate; check the design regularity "
                        "conditions (determinant criteria of the fixed designs)");
                break;   // hand off to Newton
            }
            std::vector<double> bf = f;
            if (system.B_diag) {
                const auto b = system.B_diag(theta);
                for (std::size_t i = 0; i < bf.size(); ++i) bf[i] *= b[i];
            }
            const auto y = lu.solve(bf);
            const auto step = system.C(theta) * y;

            ParamVector next = theta;
            for (std::size_t i = 0; i < next.dim(); ++i) next.coords[i] += step[i];
            const bool proj = project_local(next);
            projections = proj ? projections + 1 : 0;
            ++iterations;

            const auto fn_opt = try_eval(system, next);
            if (!fn_opt) break;   // left the evaluable region: hand off to Newton
            const auto fn = *fn_opt;
            const double norm = sup_norm(fn);
            if (norm < best_norm) {
                best_norm = norm;
                best_theta = next;
                bad_steps = 0;
            } else {
                ++bad_steps;
            }
            theta = next;
            f = fn;
            if (projections >= 2 || bad_steps >= 2) break;   // contraction lost
        }
        if (best_norm <= opts.tol) {
            res.theta_hat = best_theta;
            res.residual_norm = best_norm;
            res.converged = true;
            res.iterations = iterations;
            res.method_used = "contraction";
            res.jacobian_condition = condition_number_1(system.W(best_theta));
            return res;
        }
        if (opts.method == SolveMethod::Contraction) {
            res.theta_hat = best_theta;
            res.residual_norm = best_norm;
            res.iterations = iterations;
            res.method_used = "contraction";
            return res;
        }
    }

    // Fallback: damped Newton with central finite-difference Jacobian, resumed
    // from the best point seen so far.
    newton_used = true;
    ParamVector theta = best_theta;
    f = *try_eval(system, theta);
    double norm = sup_norm(f);
    int projections = 0;
    Matrix jac;

    while (iterations < opts.max_iter && norm > opts.tol) {
        jac = fd_jacobian(system, theta, f, opts.fd_step);
        auto lu = lu_decompose(jac);
        if (lu.singular)
            throw solver_error(
                "solve_estimating_equation: Jacobian singular at the iterate; the "
                "moment design is not regular here (see the determinant criteria)");
        std::vector<double> rhs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
        const auto dir = lu.solve(rhs);

        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 14; ++halving, t *= 0.5) {
            ParamVector cand = theta;
            for (std::size_t i = 0; i < cand.dim(); ++i) cand.coords[i] += t * dir[i];
            const bool proj = project_local(cand);
            const auto fc = try_eval(system, cand);
            if (!fc) continue;   // unevaluable candidate: shrink the step
            const double nc = sup_norm(*fc);
            if (nc < norm) {
                theta = cand;
                f = *fc;
                norm = nc;
                projections = proj ? projections + 1 : 0;
                accepted = true;
                break;
            }
        }
        ++iterations;
        if (norm < best_norm) {
            best_norm = norm;
            best_theta = theta;
        }
        if (!accepted || projections >= 2) break;
    }

    res.theta_hat = best_theta;
    res.residual_norm = best_norm;
    res.iterations = iterations;
    res.converged = best_norm <= opts.tol;
    res.method_used = contraction_used && newton_used ? "contraction+newton"
                      : newton_used                   ? "newton"
                                                      : "contraction";
    if (jac.rows() > 0) res.jacobian_condition = condition_number_1(jac);
    return res;
}

// Perturbed restart points around a base start: the finite-sample system may
// have spurious roots or stall at clamps, so a few alternative seeds in the
// scale and stability coordinates are tried.
std::vector<ParamVector> restart_points(const ParamVector& base, int restarts) {
    std::vector<ParamVector> out;
    const auto layout = coord_layout(base);
    const double beta_seeds[3] = {1.2, 2.2, 1.8};
    const double scale_mults[3] = {0.6, 1.6, 1.0};
    for (int r = 0; r < restarts; ++r) {
        ParamVector p = base;
        for (std::size_t i = 0; i < p.dim(); ++i) {
            if (layout[i].role == CoordRole::Beta) p.coords[i] = beta_seeds[r % 3];
            if (layout[i].role == CoordRole::Scale) p.coords[i] *= scale_mults[r % 3];
        }
        out.push_back(p);
    }
    return out;
}

} // namespace

EstimationResult solve_estimating_equation(const MomentSystem& system,
                                           const ParamVector& theta_init,
                                           const SolveOptions& opts) {
    ParamVector start = theta_init;
    project_into_domain(start);
    const double h_anchor = start.h_ref();

    auto within_trust = [&](const EstimationResult& r) {
        return std::abs(r.theta_hat.h_ref() - h_anchor) <= opts.trust_radius_h;
    };

    EstimationResult best = solve_single(system, start, opts, h_anchor);
    if (best.converged && within_trust(best)) return best;

    SolveOptions restart_opts = opts;
    restart_opts.max_iter = std::max(20, opts.max_iter / 2);
    for (const auto& alt : restart_points(start, opts.restarts)) {
        EstimationResult cand;
        try {
            cand = solve_single(system, alt, restart_opts, h_anchor);
        } catch (const error&) {
            continue;
        }
        const bool cand_ok = cand.converged && within_trust(cand);
        const bool best_ok = best.converged && within_trust(best);
        if (cand_ok) return cand;
        if (!best_ok && cand.residual_norm < best.residual_norm) best = cand;
    }
    // A converged root outside the trust region is reported as non-converged:
    // local uniqueness only holds near the consistent starting point.
    if (best.converged && !within_trust(best)) best.converged = false;
    return best;
}

ParamVector initial_guess(const IncrementPanel& panel, ParamDomain domain, std::size_t q) {
    const auto& c1 = panel.column_for(1);
    const auto& c2 = panel.column_for(2);
    const double v1 = pairwise_mean(c1, [](double x) { return x * x; });
    const double v2 = pairwise_mean(c2, [](double x) { return x * x; });
    double h = 0.5;
    if (v1 > 0.0 && v2 > 0.0) h = std::log(v2 / v1) / (2.0 * std::log(2.0));
    h = std::clamp(h, 0.05, 0.9);

    // Rescaled empirical characteristic exponent at lag 1: psi_hat(lambda) =
    // -log E cos(lambda delta^{-H} X_{l,1}). The level estimates the
    // transformed scale; the lambda-ratio estimates the stability index (any
    // H error cancels in the ratio).
    const double u = std::pow(panel.delta, -h);
    auto psi_hat = [&](double lambda) {
        double phi = pairwise_mean(c1, [&](double x) { return std::cos(lambda * u * x); });
        phi = std::clamp(phi, 1e-6, 1.0 - 1e-12);
        return -std::log(phi);
    };
    const double level = psi_hat(1.0);
    double beta = std::log(psi_hat(2.0) / std::max(level, 1e-12)) / std::log(2.0);
    beta = std::clamp(beta, 0.3, 2.0);

    if (domain == ParamDomain::Adaptive) {
        std::vector<MomentComponent> comps;
        for (std::size_t j = 0; j < q; ++j) {
            MomentComponent c;
            c.h = std::clamp(h + 0.1 * static_cast<double>(j), 0.05, 0.95);
            c.s = level / std::pow(2.0, static_cast<double>(j));
            c.beta = beta;
            comps.push_back(c);
        }
        for (std::size_t j = 1; j < q; ++j)
            if (comps[j].h <= comps[j - 1].h) comps[j].h = comps[j - 1].h + 0.05;
        return ParamVector::adaptive(comps);
    }

    const double a1 = level;
    return ParamVector::threshold(a1, h, 0.5 * a1, std::min(h + 0.1, 0.95), 0.5 * a1,
                                  std::min(h + 0.05, 0.93), 1.5, 0.25 * a1,
                                  std::min(h + 0.15, 0.97), 1.2);
}

std::vector<double> rate_standardized_errors(const ParamVector& truth,
                                             const ParamVector& estimate, std::size_t n,
                                             double delta, double w_n) {
    std::vector<double> diff(truth.dim());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = estimate.coords[i] - truth.coords[i];
    const Matrix rate = (truth.domain == ParamDomain::Adaptive)
                            ? rate_matrix_Cbar(truth, n, delta)
                            : rate_matrix_R(truth, n, delta, w_n);
    return solve_linear(rate, diff);
}

} // namespace mlfsm
