#ifndef MLFSM_STABLE_HPP
#define MLFSM_STABLE_HPP

#include <vector>

#include "mlfsm/rng.hpp"

namespace mlfsm {

// Symmetric stable law standardized through its characteristic function:
// a draw at scale c satisfies E exp(i*lambda*Z) = exp(-c^beta |lambda|^beta).
// beta = 2 is Gaussian with variance 2*scale^2.
struct StableLaw {
    double beta = 2.0;     // stability index in (0, 2]
    double scale = 1.0;    // nonnegative multiplier

    void validate() const;
};

double sample_sym_stable(const StableLaw& law, RngHandle& rng);

std::vector<double> sample_stable_block(const StableLaw& law, std::size_t count,
                                        RngHandle& rng);

// Mean of cos(lambda * x) over the samples; real-valued because the laws
// handled here are symmetric.
double empirical_char_fn(const std::vector<double>& samples, double lambda);

} // namespace mlfsm

#endif
