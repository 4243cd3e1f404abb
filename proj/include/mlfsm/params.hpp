#ifndef MLFSM_PARAMS_HPP
#define MLFSM_PARAMS_HPP

#include <cstddef>
#include <vector>

#include "mlfsm/model.hpp"

namespace mlfsm {

enum class ParamDomain { Adaptive, Threshold };

// Largest stability index accepted by the extended moment domain. The Fourier
// integral stays well defined above 2; iterates are clamped here.
constexpr double kBetaMax = 4.0;

// Scale component of the moment parametrization: transformed scale s, Hurst
// index h, stability index beta. Gaussian components carry beta = 2.
struct MomentComponent {
    double s = 1.0;
    double h = 0.5;
    double beta = 2.0;
};

// Parameter vector theta in estimator coordinates.
//   adaptive:  (btilde_1, H_1, beta_1, ..., btilde_q, H_q, beta_q), 3q entries
//   threshold: (atilde_1, H_1, atilde_2, H_2,
//               btilde_1, Hbar_1, beta_1, btilde_2, Hbar_2, beta_2), 10 entries
struct ParamVector {
    ParamDomain domain = ParamDomain::Adaptive;
    std::vector<double> coords;

    static ParamVector adaptive(const std::vector<MomentComponent>& comps);
    static ParamVector threshold(double a1, double H1, double a2, double H2, double b1,
                                 double Hb1, double beta1, double b2, double Hb2,
                                 double beta2);
    // Transformed coordinates of a natural-scale model at differencing order k.
    static ParamVector adaptive_from_model(const ModelParams& model, int k);

    std::size_t dim() const { return coords.size(); }
    std::size_t q() const {
        return domain == ParamDomain::Adaptive ? coords.size() / 3 : 4;
    }

    // Flattened component view [(s_j, h_j, beta_j)], ordered as in coords.
    std::vector<MomentComponent> components() const;

    // Hurst coordinate driving the rescaling u_n(theta) = w_n Delta^{-H_1}.
    double h_ref() const { return coords[1]; }

    bool in_domain() const;
    void validate() const;
};

// Coordinate role used by analytic gradients.
enum class CoordRole { Scale, Hurst, Beta };

struct CoordInfo {
    std::size_t component;   // index into components()
    CoordRole role;
};

std::vector<CoordInfo> coord_layout(const ParamVector& theta);

} // namespace mlfsm

#endif
