#ifndef MLFSM_ESTIMATORS_HPP
#define MLFSM_ESTIMATORS_HPP

#include <vector>

#include "mlfsm/design.hpp"
#include "mlfsm/linalg.hpp"
#include "mlfsm/model.hpp"
#include "mlfsm/moments.hpp"

namespace mlfsm {

// Empirical means S_n(f; u; (lambda_r, gamma_r)) across the panel, one entry
// per tuple; the design decides which test function serves each tuple.
std::vector<double> statistic_S(const IncrementPanel& panel, const MomentDesign& design,
                                double u);

// Single-function overload.
std::vector<double> statistic_S(const IncrementPanel& panel, const TestFunction& f,
                                double u, const std::vector<MomentTuple>& tuples);

// Estimating equations: empirical minus model moments at the theta-dependent
// rescaling u_n(theta). For adaptive designs this is the Schwartz-function
// system G_n, for threshold designs the stacked f1/f2 system H_n.
std::vector<double> moment_function(const ParamVector& theta, const IncrementPanel& panel,
                                    const MomentDesign& design);

// Model-expectation part alone (the centering term), one entry per tuple.
std::vector<double> moment_model_part(const ParamVector& theta, const MomentDesign& design,
                                      double delta);

// Rate matrix of the adaptive estimator (3q x 3q block-diagonal, includes the
// 1/sqrt(n) factor), exactly as displayed ahead of the adaptive CLT.
Matrix rate_matrix_Cbar(const ParamVector& theta, std::size_t n, double delta);

// Rate matrix of the threshold estimator (10 x 10, includes 1/sqrt(n)).
Matrix rate_matrix_R(const ParamVector& theta, std::size_t n, double delta, double w_n);

// Asymptotic Jacobian-limit matrices of the two estimating systems; rows
// index tuples, columns index theta coordinates.
Matrix W_bar(const ParamVector& theta, const MomentDesign& design);
Matrix W_underline(const ParamVector& theta, const MomentDesign& design);

// Solver-side standardization: the scale-free C_n(theta) blocks paired with
// the true gradient limit below (no 1/sqrt(n) factor).
Matrix solver_C(const ParamVector& theta, double delta, double w_n);
std::vector<double> solver_B_diag(const ParamVector& theta, double delta, double w_n);

// d_n(theta) = max_j w^{beta_j/2} delta^{beta_j (Hbar_j - H_1)/2} (threshold).
double threshold_dn(const ParamVector& theta, double delta, double w_n);

// Limit of D_theta[E-part] * C_n(theta): the matrix the contraction solver
// inverts. Signs follow the actual derivative of the Fourier expectation.
Matrix W_gradient_limit(const ParamVector& theta, const MomentDesign& design, double w);

} // namespace mlfsm

#endif
