#ifndef MLFSM_IDENTIFIABILITY_HPP
#define MLFSM_IDENTIFIABILITY_HPP

#include <string>
#include <vector>

#include "mlfsm/params.hpp"

namespace mlfsm {

struct IdentifiabilityEntry {
    std::string parameter;   // which Hurst coordinate the condition guards
    double bound = 0.0;      // identifiable iff value < bound
    double value = 0.0;
    bool identifiable = false;
};

struct IdentifiabilityReport {
    std::vector<IdentifiabilityEntry> entries;
    int minimal_k = 1;         // smallest differencing order satisfying the CLT condition
    bool all_identifiable = false;
};

// Consistency conditions at sampling exponent rho (delta = n^{-rho}):
//   adaptive:  H_j < H_1 + 1/(2 rho beta_j) for every component;
//   threshold: H_2 < H_1 + 1/(4 rho), Hbar_1 < H_1 + 1/(rho beta_1),
//              Hbar_2 < H_1 + 1/(2 rho beta_2) + (beta_1 / 2 beta_2)(Hbar_1 - H_1).
// Also reports the minimal differencing order k from the CLT requirement.
IdentifiabilityReport check_identifiability(const ParamVector& theta, double rho);

} // namespace mlfsm

#endif
