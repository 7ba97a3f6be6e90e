#include "gnopt/best_constant.hpp"

#include <cmath>
#include <numbers>

#include "gnopt/errors.hpp"
#include "gnopt/special.hpp"

namespace gnopt {

double closed_form_A(const GNParams& params) {
  if (!in_dpd_family(params))
    throw DomainError("closed-form constant requires p < q <= p(n-1)/(n-p) and "
                      "r = p(q-1)/(p-1)");
  const double n = params.n(), p = params.p(), q = params.q();
  const double gap = n * p - q * (n - p); // > 0 on the family

  const double log_gammas =
      log_gamma(q * (p - 1.0) / (q - p)) + log_gamma(0.5 * n + 1.0) -
      log_gamma((p - 1.0) / p * gap / (q - p)) - log_gamma(n * (p - 1.0) / p + 1.0);

  const double log_a = p * std::log((q - p) / (p * std::sqrt(std::numbers::pi))) +
                       std::log(p * q / (n * (q - p))) +
                       params.r_factor_exponent() * std::log(gap / (p * q)) +
                       (p / n) * log_gammas;
  return std::exp(log_a);
}

} // namespace gnopt
