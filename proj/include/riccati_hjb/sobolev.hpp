#ifndef RICCATI_HJB_SOBOLEV_HPP
#define RICCATI_HJB_SOBOLEV_HPP

#include <span>

namespace riccati {

/// Discrete H^s norm of uniformly spaced samples,
///
///     ||f||_{H^s}^2 = sum_k dxi (1 + xi_k^2)^s |f_hat(xi_k)|^2,   xi_k = 2 pi k / (N dx),
///
/// with the unitary continuous Fourier transform approximated by the DFT over
/// the period N * dx. Samples should decay towards both ends; the transform is
/// periodic. Any real s is accepted (the analysis uses -1, 0, 1).
double sobolev_norm(std::span<const double> samples, double dx, double s);

/// Same, with abscissae supplied. Throws InputError unless the spacing is
/// uniform to a relative 1e-9.
double sobolev_norm(std::span<const double> x, std::span<const double> samples, double s);

/// sqrt of the composite trapezoid rule applied to f^2.
double trapezoid_l2_norm(std::span<const double> samples, double dx);

}  // namespace riccati

#endif
