#include "mlfsm/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlfsm/errors.hpp"

namespace mlfsm {

IdentifiabilityReport check_identifiability(const ParamVector& theta, double rho) {
    if (!(rho >= 0.0)) throw input_error("check_identifiability: rho must be nonnegative");
    const auto comps = theta.components();
    const double h1 = comps[0].h;
    IdentifiabilityReport rep;
    rep.all_identifiable = true;

    auto add = [&](const std::string& name, double value, double bound) {
        IdentifiabilityEntry e;
        e.parameter = name;
        e.value = value;
        e.bound = bound;
        e.identifiable = value < bound;
        rep.all_identifiable = rep.all_identifiable && e.identifiable;
        rep.entries.push_back(e);
    };

    const double inf = std::numeric_limits<double>::infinity();
    double k_need = 0.0;

    if (theta.domain == ParamDomain::Adaptive) {
        for (std::size_t j = 0; j < comps.size(); ++j) {
            const auto& c = comps[j];
            const double bound =
                (rho == 0.0) ? inf : h1 + 1.0 / (2.0 * rho * c.beta);
            add("H_" + std::to_string(j + 1), c.h, bound);
            k_need = std::max(k_need, c.h + 1.0 / c.beta);
        }
    } else {
        const double H2 = comps[1].h;
        const double Hb1 = comps[2].h, beta1 = comps[2].beta;
        const double Hb2 = comps[3].h, beta2 = comps[3].beta;
        add("H_1", h1, 1.0);   // H_1 free over (0,1)
        add("H_2", H2, rho == 0.0 ? inf : h1 + 1.0 / (4.0 * rho));
        add("Hbar_1", Hb1, rho == 0.0 ? inf : h1 + 1.0 / (rho * beta1));
        add("Hbar_2", Hb2,
            rho == 0.0 ? inf
                       : h1 + 1.0 / (2.0 * rho * beta2) +
                             beta1 / (2.0 * beta2) * (Hb1 - h1));
        for (std::size_t j = 0; j < 2; ++j) k_need = std::max(k_need, comps[j].h + 0.5);
        for (std::size_t j = 2; j < 4; ++j)
            k_need = std::max(k_need, comps[j].h + 1.0 / comps[j].beta);
    }

    rep.minimal_k = static_cast<int>(std::floor(k_need)) + 1;
    return rep;
}

} // namespace mlfsm
