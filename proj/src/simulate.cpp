#include "mlfsm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlfsm/errors.hpp"
#include "mlfsm/fft.hpp"
#include "mlfsm/kernel.hpp"
#include "mlfsm/stable.hpp"
#include "mlfsm/stats_tests.hpp"

namespace mlfsm {

namespace {

constexpr std::size_t kMaxWorkSize = (std::size_t{1} << 27);

// Cell averages of u_+^alpha on the grid of spacing dcell. The first cell is
// matched in beta-norm instead (its average diverges for alpha <= -1, and the
// beta-norm value reproduces the exact marginal scale of the singular cell).
std::vector<double> cell_averaged_kernel(double alpha, double beta, std::size_t cells,
                                         double dcell) {
    std::vector<double> a(cells + 1, 0.0);
    const double scale = std::pow(dcell, alpha);
    a[1] = scale * std::pow(alpha * beta + 1.0, -1.0 / beta);
    const double ap1 = alpha + 1.0;
    if (std::abs(ap1) < 1e-12) {
        for (std::size_t j = 2; j <= cells; ++j)
            a[j] = scale * std::log(static_cast<double>(j) / (j - 1.0));
    } else {
        double prev = 1.0;   // (j-1)^{alpha+1} at j = 2
        for (std::size_t j = 2; j <= cells; ++j) {
            const double cur = std::pow(static_cast<double>(j), ap1);
            a[j] = scale * (cur - prev) / ap1;
            prev = cur;
        }
    }
    return a;
}

// Increment filter for one component: phi_j = avg(u^alpha, cell j) shifted by
// one observation step (mesh cells).
std::vector<double> increment_filter(double alpha, double beta, std::size_t cells,
                                     double dcell, std::size_t mesh) {
    const auto a = cell_averaged_kernel(alpha, beta, cells, dcell);
    std::vector<double> phi(cells);
    for (std::size_t j = 1; j <= cells; ++j)
        phi[j - 1] = a[j] - (j > mesh ? a[j - mesh] : 0.0);
    return phi;
}

} // namespace

PathSample simulate_mixed_path(const ModelParams& params, const SamplingScheme& scheme,
                               std::uint64_t rng_seed, std::uint64_t stream) {
    params.validate();
    scheme.validate();

    const std::size_t mesh = static_cast<std::size_t>(scheme.mesh);
    const double trunc = scheme.resolved_truncation();
    const std::size_t filter_cells =
        static_cast<std::size_t>(std::ceil(trunc * static_cast<double>(mesh)));
    const std::size_t n_cells = scheme.n * mesh;
    const std::size_t work = n_cells + filter_cells;
    if (work > kMaxWorkSize)
        throw capacity_error("simulate_mixed_path: n*mesh + truncation*mesh = " +
                             std::to_string(work) + " exceeds the work ceiling " +
                             std::to_string(kMaxWorkSize));

    const double dcell = scheme.delta / static_cast<double>(mesh);
    std::vector<double> increments(scheme.n, 0.0);

    for (std::size_t j = 0; j < params.q(); ++j) {
        const auto& comp = params.components[j];
        RngHandle rng(rng_seed, stream + j);

        if (is_levy_boundary(comp.H, comp.beta)) {
            // Exact path: increments are i.i.d. stable at scale delta^{1/beta}.
            StableLaw law{comp.beta, std::pow(scheme.delta, 1.0 / comp.beta)};
            for (std::size_t l = 0; l < scheme.n; ++l)
                increments[l] += comp.b * sample_sym_stable(law, rng);
            continue;
        }

        const double alpha = comp.H - 1.0 / comp.beta;
        const auto phi = increment_filter(alpha, comp.beta, filter_cells, dcell, mesh);

        StableLaw law{comp.beta, std::pow(dcell, 1.0 / comp.beta)};
        std::vector<double> noise(work);
        for (auto& x : noise) x = sample_sym_stable(law, rng);

        // D_l = sum_j phi_j * noise[l*mesh - j], with noise index 0 holding the
        // innovation for the oldest cell. conv[t] = sum_j phi_j noise[t - j].
        const auto conv = convolve(noise, phi);
        for (std::size_t l = 1; l <= scheme.n; ++l) {
            // cells up to observation l end at noise index filter_cells + l*mesh - 1
            const std::size_t t = filter_cells + l * mesh - 1;
            increments[l - 1] += comp.b * conv[t];
        }
    }

    PathSample path;
    path.scheme = scheme;
    path.values.resize(scheme.n);
    double acc = 0.0;
    for (std::size_t l = 0; l < scheme.n; ++l) {
        acc += increments[l];
        path.values[l] = acc;
    }
    return path;
}

IncrementPanel k_order_increments(const PathSample& path, int k,
                                  const std::vector<int>& gammas) {
    if (k < 1) throw input_error("k_order_increments: k must be >= 1");
    const std::size_t n = path.values.size();
    IncrementPanel panel;
    panel.k = k;
    panel.delta = path.scheme.delta;
    panel.n = n;
    panel.gammas = gammas;
    panel.columns.resize(gammas.size());

    std::vector<double> coeff(k + 1);
    for (int v = 0; v <= k; ++v)
        coeff[v] = ((v % 2 == 0) ? 1.0 : -1.0) * binomial_coeff(k, v);

    for (std::size_t c = 0; c < gammas.size(); ++c) {
        const int gamma = gammas[c];
        if (gamma < 1) throw input_error("k_order_increments: lags must be positive");
        const std::size_t first_l = static_cast<std::size_t>(k) * gamma + 1;
        if (first_l > n)
            throw input_error("k_order_increments: path of length " + std::to_string(n) +
                              " too short for (l, gamma) = (" + std::to_string(first_l) +
                              ", " + std::to_string(gamma) + ")");
        auto& col = panel.columns[c];
        col.resize(n - first_l + 1);
        for (std::size_t l = first_l; l <= n; ++l) {
            double acc = 0.0;
            for (int v = 0; v <= k; ++v) acc += coeff[v] * path.values[l - 1 - v * gamma];
            col[l - first_l] = acc;
        }
    }
    return panel;
}

SelfSimilarityReport self_similarity_check(const ModelParams& params,
                                           const SamplingScheme& scheme, int gamma,
                                           int reps, std::uint64_t seed) {
    if (params.q() != 1)
        throw input_error("self_similarity_check: mixed processes (q > 1) are not "
                          "self-similar; q = 1 required");
    if (gamma < 1) throw input_error("self_similarity_check: gamma must be >= 1");
    if (reps < 1) throw input_error("self_similarity_check: reps must be >= 1");

    const double H = params.components[0].H;
    const double scale = std::pow(static_cast<double>(gamma), H);
    // Stride decorrelates entries enough for the asymptotic KS approximation.
    const std::size_t stride = static_cast<std::size_t>(scheme.k) * gamma + 1;

    std::vector<double> lag_gamma, lag_one_scaled;
    for (int r = 0; r < reps; ++r) {
        SamplingScheme s = scheme;
        s.max_gamma = std::max(s.max_gamma, gamma);
        const auto path = simulate_mixed_path(params, s, seed, 16 * (r + 1));
        const auto panel = k_order_increments(path, s.k, {1, gamma});
        const auto& c1 = panel.column_for(1);
        const auto& cg = panel.column_for(gamma);
        for (std::size_t i = 0; i < cg.size(); i += stride) lag_gamma.push_back(cg[i]);
        for (std::size_t i = 0; i < c1.size(); i += stride)
            lag_one_scaled.push_back(scale * c1[i]);
    }

    SelfSimilarityReport rep;
    rep.sample_size = lag_gamma.size();
    if (gamma == 1) {
        rep.ks_statistic = 0.0;
        rep.p_value = 1.0;
        return rep;
    }
    const auto ks = ks_two_sample(lag_gamma, lag_one_scaled);
    rep.ks_statistic = ks.statistic;
    rep.p_value = ks.p_value;
    return rep;
}

} // namespace mlfsm
