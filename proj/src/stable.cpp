#include "mlfsm/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlfsm/errors.hpp"
#include "mlfsm/numeric.hpp"

namespace mlfsm {

namespace {
constexpr double kHalfPi = 1.5707963267948966192313216916398;
// Clamp margin keeping the CMS angle away from +-pi/2. Perturbs tail events
// with probability below 1e-15.
constexpr double kAngleMargin = 1e-12;
} // namespace

void StableLaw::validate() const {
    if (!(beta > 0.0) || !(beta <= 2.0) || std::isnan(beta))
        throw input_error("StableLaw: beta must lie in (0, 2], got " + std::to_string(beta));
    if (!(scale >= 0.0) || std::isnan(scale))
        throw input_error("StableLaw: scale must be nonnegative, got " + std::to_string(scale));
}

double sample_sym_stable(const StableLaw& law, RngHandle& rng) {
    law.validate();
    const double beta = law.beta;

    if (beta == 2.0) {
        // exp(-c^2 lambda^2) is N(0, 2 c^2)
        return law.scale * std::sqrt(2.0) * rng.next_gaussian();
    }

    double u = (rng.next_uniform() - 0.5) * 3.1415926535897932384626433832795;
    u = std::clamp(u, -kHalfPi + kAngleMargin, kHalfPi - kAngleMargin);

    if (beta == 1.0) {
        return law.scale * std::tan(u);   // standard symmetric Cauchy
    }

    // Chambers-Mallows-Stuck, symmetric case.
    double w = rng.next_exponential();
    w = std::max(w, std::numeric_limits<double>::min());
    double z = std::sin(beta * u) / std::pow(std::cos(u), 1.0 / beta) *
               std::pow(std::cos((1.0 - beta) * u) / w, (1.0 - beta) / beta);
    return law.scale * z;
}

std::vector<double> sample_stable_block(const StableLaw& law, std::size_t count,
                                        RngHandle& rng) {
    law.validate();
    std::vector<double> out(count);
    for (auto& x : out) x = sample_sym_stable(law, rng);
    return out;
}

double empirical_char_fn(const std::vector<double>& samples, double lambda) {
    if (samples.empty())
        throw input_error("empirical_char_fn: empty sample vector");
    return pairwise_mean(samples, [lambda](double x) { return std::cos(lambda * x); });
}

} // namespace mlfsm
