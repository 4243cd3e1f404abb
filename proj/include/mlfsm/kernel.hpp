#ifndef MLFSM_KERNEL_HPP
#define MLFSM_KERNEL_HPP

#include <vector>

#include "mlfsm/model.hpp"

namespace mlfsm {

// Exponents closer to zero than this are treated as the Levy boundary
// H = 1/beta, where the differencing kernel degenerates.
constexpr double kLevyBoundaryTol = 1e-6;

bool is_levy_boundary(double H, double beta);

// Alternating-binomial moving-average kernel
//   g(s) = sum_{v=0}^{k} C(k,v) (-1)^v (v - s)_+^{H - 1/beta},
// identically zero for s >= k. Throws at the degenerate exponent H = 1/beta.
double kernel_g(double H, double beta, int k, double s);

// int |g(s)|^beta ds over (-inf, k), by adaptive quadrature split at the
// integer knots; strictly positive.
double kernel_norm(double H, double beta, int k, double abs_tol = 1e-10);

// Transformed scale coordinates: btilde_j = b_j^{beta_j} * kernel_norm_j.
std::vector<double> btilde_from_b(const ModelParams& params, int k);
std::vector<double> b_from_btilde(const std::vector<double>& btilde,
                                  const ModelParams& shape, int k);

// Variance constant of the char-function-standardized fractional Brownian
// motion: for beta = 2 the lfsm satisfies Var(Y_t) = 2 * c1sq(H) * t^{2H}, with
//   c1sq(H) = Gamma(H + 1/2) Gamma(2 - 2H) / (2H Gamma(3/2 - H)).
// Used as an independent oracle for kernel_norm and the simulator.
double fbm_c1sq(double H);

// Covariance of k-th order fBm increments under the same standardization:
// Cov(Y_{z,gamma}, Y_{0,gamma'}) at integer displacement z.
double fbm_kdiff_cov(double H, int k, int gamma_r, int gamma_s, long z);

double binomial_coeff(int n, int r);

} // namespace mlfsm

#endif
