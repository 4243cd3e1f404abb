#ifndef MLFSM_DESIGN_HPP
#define MLFSM_DESIGN_HPP

#include <cstddef>
#include <vector>

#include "mlfsm/params.hpp"
#include "mlfsm/test_function.hpp"

namespace mlfsm {

struct MomentTuple {
    double lambda = 1.0;
    int gamma = 1;
};

// w_n = min(c0, eta / (9 sigma)) / sqrt(|log delta|); satisfies
// delta^eps << w_n <= (eta/9sigma)/sqrt(|log delta|) for every eps > 0.
double wn_schedule(double delta, double eta, double sigma, double c0);

// Statistical design: the moment tuples, their test-function assignment and
// the rescaling rule. Adaptive designs put every tuple on f1 with u_n =
// Delta^{-H_1}; threshold designs put tuples 1-4 on f1 and 5-10 on f2 with
// u_n = w_n Delta^{-H_1}.
struct MomentDesign {
    ParamDomain domain = ParamDomain::Adaptive;
    std::vector<MomentTuple> tuples;
    TestFunction f1 = make_gauss_bump();
    TestFunction f2 = make_smooth_threshold();
    double w_c0 = 1.0;
    double w_sigma = 1.0;   // sigma entering the w_n schedule

    std::size_t dim() const { return tuples.size(); }
    int max_gamma() const;

    // Which test function serves tuple r.
    const TestFunction& function_for(std::size_t r) const {
        if (domain == ParamDomain::Adaptive || r < 4) {
            if (domain == ParamDomain::Adaptive) return f1;
            return r < 4 ? f1 : f2;
        }
        return f2;
    }
    bool uses_f2(std::size_t r) const {
        return domain == ParamDomain::Threshold && r >= 4;
    }

    // Rescaling factor w of u_n = w * delta^{-H_1}: 1 for adaptive designs,
    // the w_n schedule for threshold designs.
    double w_factor(double delta) const;

    void validate() const;
};

// gamma cycling (1,2,4) fast and lambda cycling (1,2,4) slow over 3q tuples.
MomentDesign default_adaptive_design(std::size_t q);

// Tuples 1-4 from the regular gamma ladder (1,2,4,8); tuples 5-10 from the
// design with singularity locus H_1 beta_1 = H_2 beta_2 (easily screened).
MomentDesign default_threshold_design();

} // namespace mlfsm

#endif
