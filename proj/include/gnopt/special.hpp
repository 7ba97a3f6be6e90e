#pragma once

namespace gnopt {

/// Natural log of the Gamma function for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// Surface area of the unit sphere S^{n-1} in R^n, 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

} // namespace gnopt
