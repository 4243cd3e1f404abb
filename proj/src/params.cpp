#include "mlfsm/params.hpp"

#include <cmath>

#include "mlfsm/errors.hpp"
#include "mlfsm/kernel.hpp"

namespace mlfsm {

ParamVector ParamVector::adaptive(const std::vector<MomentComponent>& comps) {
    ParamVector p;
    p.domain = ParamDomain::Adaptive;
    p.coords.reserve(3 * comps.size());
    for (const auto& c : comps) {
        p.coords.push_back(c.s);
        p.coords.push_back(c.h);
        p.coords.push_back(c.beta);
    }
    return p;
}

ParamVector ParamVector::threshold(double a1, double H1, double a2, double H2, double b1,
                                   double Hb1, double beta1, double b2, double Hb2,
                                   double beta2) {
    ParamVector p;
    p.domain = ParamDomain::Threshold;
    p.coords = {a1, H1, a2, H2, b1, Hb1, beta1, b2, Hb2, beta2};
    return p;
}

ParamVector ParamVector::adaptive_from_model(const ModelParams& model, int k) {
    const auto bt = btilde_from_b(model, k);
    std::vector<MomentComponent> comps;
    comps.reserve(model.q());
    for (std::size_t j = 0; j < model.q(); ++j)
        comps.push_back({bt[j], model.components[j].H, model.components[j].beta});
    return adaptive(comps);
}

std::vector<MomentComponent> ParamVector::components() const {
    std::vector<MomentComponent> out;
    if (domain == ParamDomain::Adaptive) {
        out.reserve(coords.size() / 3);
        for (std::size_t j = 0; j + 3 <= coords.size(); j += 3)
            out.push_back({coords[j], coords[j + 1], coords[j + 2]});
    } else {
        out.push_back({coords[0], coords[1], 2.0});
        out.push_back({coords[2], coords[3], 2.0});
        out.push_back({coords[4], coords[5], coords[6]});
        out.push_back({coords[7], coords[8], coords[9]});
    }
    return out;
}

bool ParamVector::in_domain() const {
    if (domain == ParamDomain::Adaptive) {
        if (coords.size() < 3 || coords.size() % 3 != 0) return false;
        double prev_h = 0.0;
        for (std::size_t j = 0; j < coords.size(); j += 3) {
            const double s = coords[j], h = coords[j + 1], beta = coords[j + 2];
            if (!(s > 0.0) || !(h > 0.0 && h < 1.0) || !(beta > 0.0 && beta <= kBetaMax))
                return false;
            if (j > 0 && !(h > prev_h)) return false;
            prev_h = h;
        }
        return true;
    }
    if (coords.size() != 10) return false;
    const double H1 = coords[1], H2 = coords[3], Hb1 = coords[5], Hb2 = coords[8];
    const double beta1 = coords[6], beta2 = coords[9];
    for (std::size_t j : {std::size_t{0}, std::size_t{2}, std::size_t{4}, std::size_t{7}})
        if (!(coords[j] > 0.0)) return false;
    for (double h : {H1, H2, Hb1, Hb2})
        if (!(h > 0.0 && h < 1.0)) return false;
    for (double b : {beta1, beta2})
        if (!(b > 0.0 && b <= kBetaMax)) return false;
    if (!(H1 < H2 && H1 < Hb1 && H1 < Hb2)) return false;
    // ordering of the stable tails, (Hbar_1 - H_1) beta_1 < (Hbar_2 - H_1) beta_2
    if (!((Hb1 - H1) * beta1 < (Hb2 - H1) * beta2)) return false;
    return true;
}

void ParamVector::validate() const {
    if (!in_domain()) throw input_error("ParamVector: coordinates violate the domain");
}

std::vector<CoordInfo> coord_layout(const ParamVector& theta) {
    std::vector<CoordInfo> out;
    out.reserve(theta.dim());
    if (theta.domain == ParamDomain::Adaptive) {
        for (std::size_t i = 0; i < theta.dim(); ++i) {
            const CoordRole role = (i % 3 == 0)   ? CoordRole::Scale
                                   : (i % 3 == 1) ? CoordRole::Hurst
                                                  : CoordRole::Beta;
            out.push_back({i / 3, role});
        }
    } else {
        out.push_back({0, CoordRole::Scale});
        out.push_back({0, CoordRole::Hurst});
        out.push_back({1, CoordRole::Scale});
        out.push_back({1, CoordRole::Hurst});
        out.push_back({2, CoordRole::Scale});
        out.push_back({2, CoordRole::Hurst});
        out.push_back({2, CoordRole::Beta});
        out.push_back({3, CoordRole::Scale});
        out.push_back({3, CoordRole::Hurst});
        out.push_back({3, CoordRole::Beta});
    }
    return out;
}

} // namespace mlfsm
