#pragma once
// The space-time kernel u(t,x) = t^{-1/2} R(|x|/sqrt(t)) built from the
// Mills ratio R, together with its spatial derivative and its value on the
// spatial axis x = 0.
//
// Properties relied on downstream: u solves the backward heat equation
// u_t + u_xx/2 = 0 away from x = 0; u is even in x with a kink at the
// origin (one-sided slopes -/+ 1/t); u(t,x)|x| -> 1 as |x| -> infinity; and
// u(t, x) <= min(1/|x|, u(t,0)).

namespace follmer {

// Throws std::invalid_argument unless t > 0.
double u_kernel(double t, double x);

// du/dx; one-sided at the kink, so x == 0 throws std::invalid_argument
// (the limits are -1/t from the right and +1/t from the left).
double u_kernel_dx(double t, double x);

// u(t, 0) = sqrt(pi / (2 t)).
double u_kernel_at_zero(double t);

} // namespace follmer
