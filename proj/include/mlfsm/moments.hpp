#ifndef MLFSM_MOMENTS_HPP
#define MLFSM_MOMENTS_HPP

#include <vector>

#include "mlfsm/params.hpp"
#include "mlfsm/test_function.hpp"

namespace mlfsm {

// Characteristic exponent of the k-th order increments,
//   psi_n(lambda, gamma) = sum_j s_j lambda^{beta_j} gamma^{beta_j h_j} delta^{beta_j h_j},
// for lambda >= 0. Well defined for beta_j beyond 2 on the extended domain.
double psi_n(const ParamVector& theta, double lambda, int gamma, double delta);

// E_theta f(lambda u X_{l,n,gamma}) = int fhat(v) exp(-psi_n(|v| lambda u, gamma)) dv.
// Defines the expectation for beta_j > 2 as well (Fourier side).
double model_expectation(const TestFunction& f, const ParamVector& theta, double lambda,
                         int gamma, double delta, double u);

// Analytic gradient of model_expectation w.r.t. the theta coordinates, with the
// rescaling u = w * delta^{-H_1(theta)} differentiated through (chain rule in
// the H_1 coordinate). `w` is the theta-free factor of the rescaling.
std::vector<double> model_expectation_gradient(const TestFunction& f,
                                               const ParamVector& theta, double lambda,
                                               int gamma, double delta, double w);

} // namespace mlfsm

#endif
