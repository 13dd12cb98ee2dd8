#pragma once

#include <complex>

namespace cosbem::models {

// log I_nu(z) for real order nu >= 0 and complex z, principal branch
// (branch cut of the log along the negative real z-axis). Accurate to about
// 1e-12 relative in the exponent. Ratios I_nu(z1)/I_nu(z2) should be formed
// as exp(log_bessel_i(nu, z1) - log_bessel_i(nu, z2)).
//
// Throws std::domain_error for |z| >= 1e6 (outside the supported envelope)
// and std::invalid_argument for nu < 0.
std::complex<double> log_bessel_i(double nu, std::complex<double> z);

namespace detail {
// Same evaluation without the |z| envelope check; used internally where the
// argument is known to be a damped exponential ratio (variance density deep
// in its tail).
std::complex<double> log_bessel_i_unchecked(double nu, std::complex<double> z);
} // namespace detail

} // namespace cosbem::models
