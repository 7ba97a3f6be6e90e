#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gnopt/params.hpp"

namespace gnopt {

/// A nonnegative function of the radius together with its radial derivative
/// and the algebraic decay rates of both at infinity (value ~ C rho^-decay).
/// An infinite decay exponent marks compact support or faster-than-power decay.
///
/// Breakpoints are radii where the profile is not smooth; quadrature places
/// panel boundaries there.
class RadialProfile {
public:
  using Fn = std::function<double(double)>;

  RadialProfile(Fn value, Fn derivative, double decay_exponent,
                double derivative_decay_exponent,
                std::vector<double> breakpoints = {});

  double evaluate(double rho) const { return impl_->value(rho); }
  double evaluate_derivative(double rho) const { return impl_->derivative(rho); }
  double decay_exponent() const { return impl_->decay; }
  double derivative_decay_exponent() const { return impl_->derivative_decay; }
  const std::vector<double>& breakpoints() const { return impl_->breakpoints; }

  /// c * u
  RadialProfile scaled(double c) const;
  /// rho -> u(beta rho)
  RadialProfile dilated(double beta) const;

  /// a * u + b * v. A zero coefficient drops that term, decay included.
  static RadialProfile combine(double a, const RadialProfile& u, double b,
                               const RadialProfile& v);

private:
  struct Impl {
    Fn value;
    Fn derivative;
    double decay;
    double derivative_decay;
    std::vector<double> breakpoints;
  };
  std::shared_ptr<const Impl> impl_;
};

RadialProfile operator+(const RadialProfile& u, const RadialProfile& v);

/// exp(-rho^2 / sigma^2)
RadialProfile gaussian_profile(double sigma);

/// (1 + rho^2 / sigma^2)^-m
RadialProfile algebraic_profile(double sigma, double m);

/// ((rho - a)(b - rho))^3 on [a, b], scaled to peak 1, zero elsewhere. C^2.
RadialProfile bump_profile(double a, double b);

/// The extremal w(rho) = (1 + (q-p)/(p-1) rho^{p/(p-1)})^{-(p-1)/(q-p)}.
/// Decay exponents p/(q-p) and p/(q-p) + 1 are exact.
/// Requires the closed-form family (see in_dpd_family); DomainError otherwise.
RadialProfile extremal_profile(const GNParams& params);

} // namespace gnopt
