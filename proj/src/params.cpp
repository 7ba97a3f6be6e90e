#include "gnopt/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gnopt/errors.hpp"

namespace gnopt {

namespace {

constexpr double kEqualityRelTol = 1e-12;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kEqualityRelTol * std::max(std::abs(a), std::abs(b));
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

bool theorem_regime(double p, double q, double r, double p_star) {
  const bool first = p > 1.0 && p <= 2.0 && p < r && q >= 1.0 && q < r && r < p_star;
  const bool second = p == r && p > 1.0 && q >= 1.0 && 0.5 * p * p <= q && q < p;
  return first || second;
}

} // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
  case Regime::GeneralGN:
    return "GeneralGN";
  case Regime::TheoremValidity:
    return "TheoremValidity";
  case Regime::DelPinoDolbeault:
    return "DelPinoDolbeault";
  case Regime::BlowupNonvalidity:
    return "BlowupNonvalidity";
  }
  return "unknown";
}

double GNParams::q_factor_exponent() const {
  return p_ * (1.0 - theta_) / (theta_ * q_);
}

double GNParams::r_factor_exponent() const { return p_ / (r_ * theta_); }

double dpd_r(double p, double q) {
  if (!(p > 1.0))
    throw DomainError("p must exceed 1");
  return p * (q - 1.0) / (p - 1.0);
}

double dpd_q_upper(int n, double p) { return p * (n - 1) / (n - p); }

GNParams validate_params(int n, double p, double q, double r) {
  if (n < 2)
    throw DomainError("n must be an integer >= 2");
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(r))
    throw DomainError("p, q and r must be finite");
  if (!(p > 1.0))
    throw DomainError("p must exceed 1");
  if (!(q >= 1.0))
    throw DomainError("q must be >= 1");
  if (!(q < r))
    throw DomainError("q must be < r");

  const double p_star =
      p < n ? n * p / (n - p) : std::numeric_limits<double>::infinity();
  const bool theorem = theorem_regime(p, q, r, p_star);
  if (p >= n && !theorem)
    throw DomainError("p must be < n outside the theorem regime (got p = " +
                      num(p) + ", n = " + std::to_string(n) + ")");
  if (!(r <= p_star))
    throw DomainError("r must be <= p* = " + num(p_star));

  GNParams params;
  params.n_ = n;
  params.p_ = p;
  params.q_ = q;
  params.r_ = r;
  params.p_star_ = p_star;
  params.theta_ = theta(n, p, q, r);
  // Rounding at r = p* can land a hair above 1.
  if (params.theta_ > 1.0 && params.theta_ <= 1.0 + 1e-12)
    params.theta_ = 1.0;
  if (!(params.theta_ > 0.0 && params.theta_ <= 1.0))
    throw DomainError("theta = " + num(params.theta_) + " lies outside (0, 1]");

  const bool dpd = p < n && p < q && q < dpd_q_upper(n, p) && nearly_equal(r, dpd_r(p, q));
  if (dpd && p > std::max(2.0, 2.0 * q / 3.0))
    params.regime_ = Regime::BlowupNonvalidity;
  else if (dpd)
    params.regime_ = Regime::DelPinoDolbeault;
  else if (theorem)
    params.regime_ = Regime::TheoremValidity;
  else
    params.regime_ = Regime::GeneralGN;
  return params;
}

GNParams validate_params(int n, double p, double q) {
  return validate_params(n, p, q, dpd_r(p, q));
}

double theta(const GNParams& params) { return params.theta(); }

double theta(int n, double p, double q, double r) {
  return n * p * (r - q) / (r * (q * (p - n) + n * p));
}

bool in_dpd_family(const GNParams& params) {
  const int n = params.n();
  const double p = params.p(), q = params.q();
  return p < n && p < q && q <= dpd_q_upper(n, p) &&
         nearly_equal(params.r(), dpd_r(p, q));
}

bool satisfies_theorem(const GNParams& params) {
  return theorem_regime(params.p(), params.q(), params.r(), params.p_star());
}

std::pair<bool, bool> blowup_regime_equivalence(int n, double p) {
  if (!(p > 1.0) || !(p < n))
    throw DomainError("blowup_regime_equivalence requires 1 < p < n");
  const double q = dpd_q_upper(n, p);
  const bool first = p > std::max(2.0, 2.0 * q / 3.0);
  const bool second = 2.0 < p && p < (n + 2.0) / 3.0;
  return {first, second};
}

} // namespace gnopt
