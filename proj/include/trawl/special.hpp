#pragma once

// Special functions on doubles. Shape derivatives of the incomplete
// functions are computed by forward-mode differentiation of the same
// continued fractions (see incomplete.hpp).

namespace trawl {

double digamma(double x);
double trigamma(double x);
double polygamma(int n, double x);
double log_beta(double a, double b);

double normal_pdf(double x);
double normal_cdf(double x);
double normal_log_cdf(double x);
double normal_quantile(double p);
double log_erfc(double x);

// Regularized incomplete gamma P(a,x), Q(a,x) and the inverse of P.
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double gamma_p_inv(double a, double p);
// P(a,x) and dP/da.
void gamma_p_with_shape_derivative(double a, double x, double& p, double& dp_da);

// Regularized incomplete beta I_x(a,b) and its inverse in x.
double inc_beta(double a, double b, double x);
double inc_beta_inv(double a, double b, double p);
// I_x(a,b), dI/da, dI/db.
void inc_beta_with_shape_derivatives(double a, double b, double x, double& v, double& da,
                                     double& db);

// Modified Bessel functions. Power series below the switch point, large
// argument expansion or continued fractions above it.
double log_bessel_i(double nu, double z);
double bessel_i(double nu, double z);
// d/dz log I_nu(z).
double log_bessel_i_dz(double nu, double z);
// exp(z) K_n(z) for integer n >= 0.
double bessel_k_scaled(int n, double z);
double bessel_k(int n, double z);
double log_bessel_k(int n, double z);
// Derivatives 0..order of g(z) = exp(z) K_1(z).
void bessel_k1_scaled_derivatives(double z, int order, double* out);

}  // namespace trawl
