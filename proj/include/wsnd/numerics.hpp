#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>

#include "wsnd/rng.hpp"

namespace wsnd {

using Complex = std::complex<double>;

struct NotPsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Lower-triangular factor L with L L^H = A for Hermitian PSD A.
// Pivots in [-tol, 0] with tol = 1e-12 * |trace| / dim are clipped to zero
// (semidefinite inputs give zero diagonal entries); a pivot below -tol
// throws NotPsdError.
Eigen::MatrixXcd cholesky_psd(const Eigen::MatrixXcd& a);

// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a);

// ln I_nu(x) for integer order nu >= 0 and x >= 0; -inf at x = 0, nu >= 1.
// Power series for small x, Debye-type uniform asymptotic expansion for
// large x; everything stays in the log domain.
double log_bessel_i(int order, double x);

// ln P(a, x) with P the lower regularized incomplete gamma function.
double log_gamma_lower_regularized(double a, double x);

// L * w with w i.i.d. CN(0,1).
Eigen::VectorXcd sample_complex_gaussian(const Eigen::MatrixXcd& chol,
                                         RngStream& rng);

struct ScalarMaxResult {
  double x;
  double value;
};

// Derivative-free bounded maximization (Brent: golden section refined by
// parabolic interpolation). Boundary maxima are returned as lo or hi.
// Throws NonFiniteError if f evaluates to NaN inside the bracket.
ScalarMaxResult maximize_scalar_bounded(const std::function<double(double)>& f,
                                        double lo, double hi, double x0,
                                        double tol = 1e-8);

}  // namespace wsnd
