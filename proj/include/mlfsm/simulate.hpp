#ifndef MLFSM_SIMULATE_HPP
#define MLFSM_SIMULATE_HPP

#include <vector>

#include "mlfsm/model.hpp"
#include "mlfsm/rng.hpp"

namespace mlfsm {

// Discretized moving-average simulation of the mixed model. Each component
// draws from its own stream derived from `rng_seed`/`stream`: component j of a
// path uses stream `stream + j`. The Levy boundary H = 1/beta is simulated
// exactly as i.i.d. stable increments.
PathSample simulate_mixed_path(const ModelParams& params, const SamplingScheme& scheme,
                               std::uint64_t rng_seed, std::uint64_t stream);

// k-th order increments at each requested lag.
IncrementPanel k_order_increments(const PathSample& path, int k,
                                  const std::vector<int>& gammas);

struct SelfSimilarityReport {
    double ks_statistic = 0.0;
    double p_value = 1.0;
    std::size_t sample_size = 0;
};

// Two-sample KS check of lag-gamma increments against gamma^H-scaled lag-1
// increments; defined for q = 1 only.
SelfSimilarityReport self_similarity_check(const ModelParams& params,
                                           const SamplingScheme& scheme, int gamma,
                                           int reps, std::uint64_t seed);

} // namespace mlfsm

#endif
