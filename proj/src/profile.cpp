#include "gnopt/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gnopt/errors.hpp"

namespace gnopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RadialProfile::RadialProfile(Fn value, Fn derivative, double decay_exponent,
                             double derivative_decay_exponent,
                             std::vector<double> breakpoints)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(value), std::move(derivative), decay_exponent,
               derivative_decay_exponent, std::move(breakpoints)})) {}

RadialProfile RadialProfile::scaled(double c) const {
  auto impl = impl_;
  return RadialProfile([impl, c](double rho) { return c * impl->value(rho); },
                       [impl, c](double rho) { return c * impl->derivative(rho); },
                       impl->decay, impl->derivative_decay, impl->breakpoints);
}

RadialProfile RadialProfile::dilated(double beta) const {
  if (!(beta > 0.0))
    throw DomainError("dilation factor must be positive");
  auto impl = impl_;
  std::vector<double> bps;
  bps.reserve(impl->breakpoints.size());
  for (double b : impl->breakpoints)
    bps.push_back(b / beta);
  return RadialProfile(
      [impl, beta](double rho) { return impl->value(beta * rho); },
      [impl, beta](double rho) { return beta * impl->derivative(beta * rho); },
      impl->decay, impl->derivative_decay, std::move(bps));
}

RadialProfile RadialProfile::combine(double a, const RadialProfile& u, double b,
                                     const RadialProfile& v) {
  if (b == 0.0)
    return u.scaled(a);
  if (a == 0.0)
    return v.scaled(b);
  auto iu = u.impl_;
  auto iv = v.impl_;
  std::vector<double> bps = iu->breakpoints;
  bps.insert(bps.end(), iv->breakpoints.begin(), iv->breakpoints.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return RadialProfile(
      [iu, iv, a, b](double rho) { return a * iu->value(rho) + b * iv->value(rho); },
      [iu, iv, a, b](double rho) {
        return a * iu->derivative(rho) + b * iv->derivative(rho);
      },
      std::min(iu->decay, iv->decay),
      std::min(iu->derivative_decay, iv->derivative_decay), std::move(bps));
}

RadialProfile operator+(const RadialProfile& u, const RadialProfile& v) {
  return RadialProfile::combine(1.0, u, 1.0, v);
}

RadialProfile gaussian_profile(double sigma) {
  if (!(sigma > 0.0))
    throw DomainError("gaussian width must be positive");
  const double inv = 1.0 / (sigma * sigma);
  return RadialProfile([inv](double rho) { return std::exp(-rho * rho * inv); },
                       [inv](double rho) {
                         return -2.0 * rho * inv * std::exp(-rho * rho * inv);
                       },
                       kInf, kInf);
}

RadialProfile algebraic_profile(double sigma, double m) {
  if (!(sigma > 0.0) || !(m > 0.0))
    throw DomainError("algebraic profile needs sigma > 0 and m > 0");
  const double inv = 1.0 / (sigma * sigma);
  return RadialProfile(
      [inv, m](double rho) { return std::pow(1.0 + rho * rho * inv, -m); },
      [inv, m](double rho) {
        return -2.0 * m * rho * inv * std::pow(1.0 + rho * rho * inv, -m - 1.0);
      },
      2.0 * m, 2.0 * m + 1.0);
}

RadialProfile bump_profile(double a, double b) {
  if (!(a >= 0.0) || !(b > a))
    throw DomainError("bump support must satisfy 0 <= a < b");
  const double half = 0.5 * (b - a);
  const double norm = 1.0 / std::pow(half, 6);
  auto value = [a, b, norm](double rho) {
    if (rho <= a || rho >= b)
      return 0.0;
    const double s = (rho - a) * (b - rho);
    return norm * s * s * s;
  };
  auto derivative = [a, b, norm](double rho) {
    if (rho <= a || rho >= b)
      return 0.0;
    const double s = (rho - a) * (b - rho);
    return norm * 3.0 * s * s * (a + b - 2.0 * rho);
  };
  return RadialProfile(value, derivative, kInf, kInf, {a, b});
}

RadialProfile extremal_profile(const GNParams& params) {
  const double p = params.p(), q = params.q();
  if (!(q > p))
    throw DomainError("extremal profile requires q > p");
  if (!in_dpd_family(params))
    throw DomainError("extremal profile requires p < q <= p(n-1)/(n-p) and "
                      "r = p(q-1)/(p-1)");
  const double a = (q - p) / (p - 1.0);
  const double s = p / (p - 1.0);
  const double m = (p - 1.0) / (q - p);
  auto value = [a, s, m](double rho) {
    return std::exp(-m * std::log1p(a * std::pow(rho, s)));
  };
  auto derivative = [a, s, m](double rho) {
    if (rho == 0.0)
      return 0.0;
    const double base = a * std::pow(rho, s);
    return -m * a * s * std::pow(rho, s - 1.0) *
           std::exp((-m - 1.0) * std::log1p(base));
  };
  const double decay = p / (q - p);
  return RadialProfile(value, derivative, decay, decay + 1.0);
}

} // namespace gnopt
