#include "mlfsm/design.hpp"

#include <algorithm>
#include <cmath>

#include "mlfsm/errors.hpp"

namespace mlfsm {

double wn_schedule(double delta, double eta, double sigma, double c0) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw config_error("wn_schedule: delta must lie in (0,1) so log(delta) is negative");
    if (!(eta > 0.0) || !(sigma > 0.0) || !(c0 > 0.0))
        throw config_error("wn_schedule: eta, sigma, c0 must be positive");
    const double cap = std::min(c0, eta / (9.0 * sigma));
    return cap / std::sqrt(std::abs(std::log(delta)));
}

int MomentDesign::max_gamma() const {
    int m = 1;
    for (const auto& t : tuples) m = std::max(m, t.gamma);
    return m;
}

double MomentDesign::w_factor(double delta) const {
    if (domain == ParamDomain::Adaptive) return 1.0;
    return wn_schedule(delta, f2.eta, w_sigma, w_c0);
}

void MomentDesign::validate() const {
    if (tuples.empty()) throw config_error("MomentDesign: no tuples");
    for (const auto& t : tuples) {
        if (t.gamma < 1) throw config_error("MomentDesign: gamma must be >= 1");
        if (t.lambda == 0.0) throw config_error("MomentDesign: lambda must be nonzero");
    }
    if (domain == ParamDomain::Threshold && tuples.size() != 10)
        throw config_error("MomentDesign: threshold designs need exactly 10 tuples");
    f1.validate();
    if (domain == ParamDomain::Threshold) f2.validate();
}

MomentDesign default_adaptive_design(std::size_t q) {
    MomentDesign d;
    d.domain = ParamDomain::Adaptive;
    if (q == 1) {
        // Mixing lambda and gamma variation conditions W an order of magnitude
        // better than a single-lambda ladder, and the lambda = 1/2 tuples keep
        // the stability index well identified on Gaussian-like samples.
        d.tuples = {{0.5, 1}, {2.0, 1}, {0.5, 2}};
        return d;
    }
    const int gam[3] = {1, 2, 4};
    const double lam[3] = {0.5, 1.0, 2.0};
    for (std::size_t r = 0; r < 3 * q; ++r)
        d.tuples.push_back({lam[(r / 3) % 3], gam[r % 3]});
    return d;
}

MomentDesign default_threshold_design() {
    MomentDesign d;
    d.domain = ParamDomain::Threshold;
    d.tuples = {{1.0, 1}, {1.0, 2}, {1.0, 4}, {1.0, 8},
                {1.0, 1}, {1.0, 2}, {2.0, 2}, {1.0, 4}, {1.0, 8}, {2.0, 8}};
    return d;
}

} // namespace mlfsm
