#pragma once
// Standard Normal utilities: density and distribution function, the Mills
// ratio with a large-argument continued-fraction branch, and the mean of a
// folded Normal distribution.

namespace follmer {

double normal_pdf(double x);
double normal_cdf(double x);

// R(z) = (1 - Phi(z)) / phi(z).  erfc-based for z <= 6; Laplace continued
// fraction evaluated bottom-up beyond that, where the erfc form loses
// relative accuracy.  The two branches agree to ~3e-15 at the switch point.
double mills_ratio(double z);

// E|X| for X ~ Normal(mu, sigma^2).  sigma = 0 degenerates to |mu|.
double folded_normal_mean(double mu, double sigma);

} // namespace follmer
