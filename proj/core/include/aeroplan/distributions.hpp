#pragma once

// Distribution functions used by the analysis pipeline. All are computed
// here from the regularized incomplete beta function and direct numerical
// integration; no statistics library is involved.

#include <functional>

namespace aeroplan {

// Regularized incomplete beta I_x(a, b), by Lentz's continued fraction.
// Throws kInvalidArgument for x outside [0, 1] or a, b <= 0.
double incomplete_beta(double x, double a, double b);

double normal_pdf(double z);
double normal_cdf(double z);

double f_cdf(double x, double df1, double df2);
// Upper tail, evaluated directly (not as 1 - cdf) to keep small p accurate.
double f_sf(double x, double df1, double df2);

double t_cdf(double t, double df);
double t_quantile(double p, double df);

// Studentized range of k means with df error degrees of freedom.
double ptukey(double q, int k, double df);
// Upper tail P(Q > q).
double ptukey_sf(double q, int k, double df);

// Adaptive 15-point Gauss-Kronrod on [a, b] to the given absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 30);

}  // namespace aeroplan
