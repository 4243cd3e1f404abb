#ifndef MLFSM_MODEL_HPP
#define MLFSM_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mlfsm {

// One driving component: scale b > 0, Hurst H in (0,1), stability beta in (0,2].
struct Component {
    double b = 1.0;
    double H = 0.5;
    double beta = 2.0;
};

// Mixed model X_t = sum_j b_j Y_t^{H_j, beta_j}; Hurst indices strictly increasing.
struct ModelParams {
    std::vector<Component> components;

    std::size_t q() const { return components.size(); }
    void validate() const;
};

// Observation design: n samples at frequency delta, differencing order k,
// plus the discretization controls of the moving-average simulation.
struct SamplingScheme {
    std::size_t n = 1000;
    double delta = 1e-3;
    int k = 2;
    int mesh = 16;            // substeps per delta
    double truncation = 0.0;  // kernel cutoff in units of delta; 0 -> auto
    double burn_in = 0.0;     // pre-sample horizon in units of delta; 0 -> truncation
    int max_gamma = 1;        // largest lag the panel will use downstream

    double resolved_truncation() const;
    double resolved_burn_in() const;
    void validate() const;
};

struct PathSample {
    std::vector<double> values;   // X at times delta, 2*delta, ..., n*delta
    SamplingScheme scheme;
    std::uint64_t params_hash = 0;
};

// k-th order increments X_{l,n,gamma}; one column per lag gamma. Column r
// holds entries for l = k*gamma_r + 1, ..., n (so column lengths differ).
struct IncrementPanel {
    std::vector<int> gammas;
    std::vector<std::vector<double>> columns;
    int k = 1;
    double delta = 0.0;
    std::size_t n = 0;

    const std::vector<double>& column_for(int gamma) const;
    std::size_t first_l(std::size_t col) const {
        return static_cast<std::size_t>(k * gammas[col]) + 1;
    }
};

} // namespace mlfsm

#endif
