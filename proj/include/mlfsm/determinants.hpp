#ifndef MLFSM_DETERMINANTS_HPP
#define MLFSM_DETERMINANTS_HPP

#include <string>

#include "mlfsm/linalg.hpp"

namespace mlfsm {

// The three fixed designs whose reduced W blocks have closed-form
// determinants. Case I covers the Gaussian 4x4 block on gamma = (1,2,4,8);
// cases II and III cover the stable 6x6 block on the two lag/scale ladders.
enum class RegularityCase { I, II, III };

struct DeterminantCheck {
    double numeric = 0.0;       // LU determinant of the reduced matrix
    double closed_form = 0.0;   // symbolic value
    Matrix reduced;             // the matrix the determinant was taken of
    std::string singular_when;  // description of the singularity locus
};

// Case I uses (H1, H2) of the two Gaussian components; cases II and III use
// (H1, beta1, H2, beta2) of the two stable components.
DeterminantCheck regularity_determinants(RegularityCase c, double H1, double beta1,
                                         double H2, double beta2);

} // namespace mlfsm

#endif
